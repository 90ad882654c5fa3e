//! Dense encoding of `min I(T; X̃)` over a product of pattern simplices.
//!
//! Each support point `(x, t)` is a row with one weight per allowed failure
//! pattern. A (row, pattern) pair lands in a fixed garbled cell `(x̃, t)`, so
//! the garbled joint is a sparse linear image of the weights.

use std::collections::HashMap;

use crate::dist::Symbol;
use crate::sfs::FailurePattern;
use crate::JointSystem;

pub(crate) struct Problem {
    pub rows: usize,
    pub patterns: Vec<FailurePattern>,
    pub row_mass: Vec<f64>,
    /// `rows * k` → garbled joint cell.
    joint_cell: Vec<usize>,
    cell_x: Vec<usize>,
    cell_t: Vec<usize>,
    target_mass: Vec<f64>,
    x_cells: usize,
}

/// Garbled marginals for a weight vector.
pub(crate) struct Garbled {
    joint: Vec<f64>,
    x: Vec<f64>,
}

impl Problem {
    pub fn new(system: &JointSystem, patterns: Vec<FailurePattern>) -> Self {
        let support = system.support();
        let k = patterns.len();
        let mut t_index: HashMap<Symbol, usize> = HashMap::new();
        let mut target_mass = Vec::new();
        for o in support {
            let next = t_index.len();
            let ti = *t_index.entry(o.t).or_insert(next);
            if ti == target_mass.len() {
                target_mass.push(0.0);
            }
            target_mass[ti] += o.p;
        }

        let mut x_index: HashMap<Vec<Symbol>, usize> = HashMap::new();
        let mut joint_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut cell_x = Vec::new();
        let mut cell_t = Vec::new();
        let mut joint_cell = Vec::with_capacity(support.len() * k);
        for o in support {
            let ti = t_index[&o.t];
            for f in &patterns {
                let next = x_index.len();
                let xi = *x_index.entry(f.apply(&o.x)).or_insert(next);
                let next = joint_index.len();
                let ci = *joint_index.entry((xi, ti)).or_insert(next);
                if ci == cell_x.len() {
                    cell_x.push(xi);
                    cell_t.push(ti);
                }
                joint_cell.push(ci);
            }
        }
        Self {
            rows: support.len(),
            patterns,
            row_mass: support.iter().map(|o| o.p).collect(),
            joint_cell,
            cell_x,
            cell_t,
            target_mass,
            x_cells: x_index.len(),
        }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.patterns.len()
    }

    pub fn garble(&self, w: &[f64]) -> Garbled {
        let mut g = Garbled {
            joint: vec![0.0; self.cell_x.len()],
            x: vec![0.0; self.x_cells],
        };
        self.garble_into(w, &mut g);
        g
    }

    pub fn garble_into(&self, w: &[f64], g: &mut Garbled) {
        g.joint.iter_mut().for_each(|v| *v = 0.0);
        g.x.iter_mut().for_each(|v| *v = 0.0);
        let k = self.k();
        for r in 0..self.rows {
            let pr = self.row_mass[r];
            for j in 0..k {
                let m = pr * w[r * k + j];
                if m > 0.0 {
                    let c = self.joint_cell[r * k + j];
                    g.joint[c] += m;
                    g.x[self.cell_x[c]] += m;
                }
            }
        }
    }

    /// `I(T; X̃)` in bits.
    pub fn objective(&self, g: &Garbled) -> f64 {
        let mut total = 0.0;
        for (c, &q) in g.joint.iter().enumerate() {
            if q > 0.0 {
                total += q * (q / (g.x[self.cell_x[c]] * self.target_mass[self.cell_t[c]])).log2();
            }
        }
        total.max(0.0)
    }

    /// `p(x, t) log2 p(t | x̃)` for every (row, pattern). Empty garbled cells
    /// give 0; a cell that holds other targets but not this one gives -inf.
    pub fn gradient(&self, g: &Garbled, out: &mut [f64]) {
        let k = self.k();
        for r in 0..self.rows {
            let pr = self.row_mass[r];
            for j in 0..k {
                let c = self.joint_cell[r * k + j];
                let qj = g.joint[c];
                let qx = g.x[self.cell_x[c]];
                out[r * k + j] = if qj > 0.0 {
                    pr * (qj / qx).log2()
                } else if qx > 0.0 {
                    f64::NEG_INFINITY
                } else {
                    0.0
                };
            }
        }
    }

    /// Per-row argmin of the gradient, lowest pattern index on ties.
    pub fn linear_oracle(&self, grad: &[f64], vertex: &mut [usize]) {
        let k = self.k();
        for (r, v) in vertex.iter_mut().enumerate() {
            let row = &grad[r * k..(r + 1) * k];
            let mut best = 0;
            for j in 1..k {
                if row[j] < row[best] {
                    best = j;
                }
            }
            *v = best;
        }
    }

    #[inline]
    fn entry(&self, r: usize, j: usize, g: &Garbled) -> f64 {
        let c = self.joint_cell[r * self.k() + j];
        let (qj, qx) = (g.joint[c], g.x[self.cell_x[c]]);
        if qj > 0.0 {
            (qj / qx).ln()
        } else if qx > 0.0 {
            f64::NEG_INFINITY
        } else {
            0.0
        }
    }

    /// One exact pairwise step inside row `r`, updating `row` and the garbled
    /// marginals in place.
    ///
    /// Moving mass `s` from cell `a` to cell `v` (same target) changes the
    /// objective with slope `log[(Qv+s)/(Xv+s)] − log[(Qa−s)/(Xa−s)]`, which
    /// is increasing in `s` and vanishes at
    /// `s* = (Qa·Xv − Qv·Xa) / ((Xa − Qa) + (Xv − Qv))`.
    pub fn pairwise_step(&self, r: usize, row: &mut [f64], g: &mut Garbled) -> bool {
        let k = self.k();
        let mut v = 0;
        let mut gv = self.entry(r, 0, g);
        let mut a = usize::MAX;
        let mut ga = f64::NEG_INFINITY;
        for (j, &wj) in row.iter().enumerate() {
            let e = self.entry(r, j, g);
            if e < gv {
                v = j;
                gv = e;
            }
            if wj > 0.0 && (a == usize::MAX || e > ga) {
                a = j;
                ga = e;
            }
        }
        if a == usize::MAX || a == v || ga <= gv {
            return false;
        }
        let cv = self.joint_cell[r * k + v];
        let ca = self.joint_cell[r * k + a];
        if cv == ca {
            return false;
        }
        let (xv, xa) = (self.cell_x[cv], self.cell_x[ca]);
        let (qv, qa) = (g.joint[cv], g.joint[ca]);
        let (mv, ma) = (g.x[xv], g.x[xa]);
        let pr = self.row_mass[r];
        let cap = pr * row[a];
        let other = (ma - qa) + (mv - qv);
        let s = if other > 0.0 {
            ((qa * mv - qv * ma) / other).clamp(0.0, cap)
        } else {
            cap
        };
        if s.is_nan() || s <= 0.0 {
            return false;
        }
        let moved = if s >= cap { row[a] } else { s / pr };
        row[a] -= moved;
        row[v] += moved;
        if s >= cap {
            row[a] = 0.0;
        }
        let s = pr * moved;
        g.joint[ca] -= s;
        g.x[xa] -= s;
        g.joint[cv] += s;
        g.x[xv] += s;
        if row[a] == 0.0 {
            g.joint[ca] = g.joint[ca].max(0.0);
            g.x[xa] = g.x[xa].max(0.0);
        }
        true
    }

    /// `<grad, W - V>`.
    pub fn duality_gap(&self, w: &[f64], grad: &[f64], vertex: &[usize]) -> f64 {
        let k = self.k();
        let mut gap = 0.0;
        for (r, &v) in vertex.iter().enumerate() {
            let mut at_w = 0.0;
            for j in 0..k {
                let wj = w[r * k + j];
                if wj > 0.0 {
                    at_w += wj * grad[r * k + j];
                }
            }
            gap += at_w - grad[r * k + v];
        }
        gap
    }
}
