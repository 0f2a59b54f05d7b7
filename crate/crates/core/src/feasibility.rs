//! Linear programming over `simplex ∩ L`: support of a family, feasible and
//! interior starting points, emptiness detection.
//!
//! The solver is a dense two-phase tableau simplex with Bland's rule, which is
//! enough for desk-scale alphabets and never cycles.

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::family::LinearFamily;
use crate::linalg;

/// Pivot elements smaller than this are never used.
pub const PIVOT_TOL: f64 = 1e-11;

/// A coordinate is in `Supp(L)` when its LP maximum exceeds this.
pub const SUPPORT_TOL: f64 = 1e-10;

/// Phase-one optimum above this means the constraints are inconsistent.
const PHASE_ONE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub point: Vec<f64>,
    pub objective: f64,
    pub status: LpStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Ge,
    Eq,
}

/// `coeffs . x (<=|>=|=) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub kind: RowKind,
    pub rhs: f64,
}

impl LpRow {
    pub fn le(coeffs: Vec<f64>, rhs: f64) -> Self {
        Self {
            coeffs,
            kind: RowKind::Le,
            rhs,
        }
    }
    pub fn ge(coeffs: Vec<f64>, rhs: f64) -> Self {
        Self {
            coeffs,
            kind: RowKind::Ge,
            rhs,
        }
    }
    pub fn eq(coeffs: Vec<f64>, rhs: f64) -> Self {
        Self {
            coeffs,
            kind: RowKind::Eq,
            rhs,
        }
    }
}

/// `maximize c . x subject to rows, x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
}

struct Tableau {
    /// `m` constraint rows followed by the objective row; last column is the rhs.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    /// Columns that may enter the basis.
    allowed: Vec<bool>,
}

impl Tableau {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn cols(&self) -> usize {
        self.t[0].len() - 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.t[0].len();
        let p = self.t[row][col];
        for j in 0..width {
            self.t[row][j] /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (x, y) in r.iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations on the objective row (stored as `-c`, minimize form
    /// of reduced costs). Returns false when unbounded.
    fn optimize(&mut self) -> bool {
        let m = self.m();
        let cols = self.cols();
        loop {
            // Bland: lowest-index column with a negative reduced cost enters.
            let Some(enter) = (0..cols).find(|&j| self.allowed[j] && self.t[m][j] < -PIVOT_TOL)
            else {
                return true;
            };
            // Ratio test; ties go to the lowest basic variable index.
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.t[i][enter];
                if a > PIVOT_TOL {
                    let ratio = self.t[i][cols] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12
                                || (ratio <= lr + 1e-12 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, enter),
                None => return false,
            }
        }
    }
}

pub fn solve_program(lp: &LinearProgram) -> LpSolution {
    let nv = lp.objective.len();
    // Normalize signs so every rhs is nonnegative.
    let rows: Vec<LpRow> = lp
        .rows
        .iter()
        .map(|r| {
            debug_assert_eq!(r.coeffs.len(), nv);
            if r.rhs < 0.0 {
                LpRow {
                    coeffs: r.coeffs.iter().map(|x| -x).collect(),
                    kind: match r.kind {
                        RowKind::Le => RowKind::Ge,
                        RowKind::Ge => RowKind::Le,
                        RowKind::Eq => RowKind::Eq,
                    },
                    rhs: -r.rhs,
                }
            } else {
                r.clone()
            }
        })
        .collect();
    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.kind != RowKind::Eq).count();
    let n_art = rows.iter().filter(|r| r.kind != RowKind::Le).count();
    let cols = nv + n_slack + n_art;
    let mut t = vec![vec![0.0; cols + 1]; m + 1];
    let mut basis = vec![0; m];
    let (mut s, mut a) = (nv, nv + n_slack);
    for (i, r) in rows.iter().enumerate() {
        t[i][..nv].copy_from_slice(&r.coeffs);
        t[i][cols] = r.rhs;
        match r.kind {
            RowKind::Le => {
                t[i][s] = 1.0;
                basis[i] = s;
                s += 1;
            }
            RowKind::Ge => {
                t[i][s] = -1.0;
                s += 1;
                t[i][a] = 1.0;
                basis[i] = a;
                a += 1;
            }
            RowKind::Eq => {
                t[i][a] = 1.0;
                basis[i] = a;
                a += 1;
            }
        }
    }
    let art_start = nv + n_slack;
    let mut tab = Tableau {
        t,
        basis,
        allowed: vec![true; cols],
    };

    // Phase one: minimize the sum of artificials, i.e. maximize its negative.
    if n_art > 0 {
        for j in art_start..cols {
            tab.t[m][j] = 1.0;
        }
        for i in 0..m {
            if tab.basis[i] >= art_start {
                for j in 0..=cols {
                    let v = tab.t[i][j];
                    tab.t[m][j] -= v;
                }
            }
        }
        tab.optimize();
        if -tab.t[m][cols] > PHASE_ONE_TOL {
            return LpSolution {
                point: vec![0.0; nv],
                objective: f64::NAN,
                status: LpStatus::Infeasible,
            };
        }
        // Drive artificials out of the basis; drop rows that are redundant.
        let mut i = 0;
        while i < tab.m() {
            if tab.basis[i] >= art_start {
                if let Some(j) = (0..art_start).find(|&j| tab.t[i][j].abs() > PIVOT_TOL) {
                    tab.pivot(i, j);
                } else {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
            i += 1;
        }
        for j in art_start..cols {
            tab.allowed[j] = false;
        }
    }

    // Phase two.
    let m = tab.m();
    let obj = &mut tab.t[m];
    obj.iter_mut().for_each(|x| *x = 0.0);
    for (j, &c) in lp.objective.iter().enumerate() {
        obj[j] = -c;
    }
    for i in 0..m {
        let b = tab.basis[i];
        let f = tab.t[m][b];
        if f != 0.0 {
            for j in 0..=cols {
                let v = tab.t[i][j];
                tab.t[m][j] -= f * v;
            }
        }
    }
    if !tab.optimize() {
        return LpSolution {
            point: vec![0.0; nv],
            objective: f64::INFINITY,
            status: LpStatus::Unbounded,
        };
    }
    let mut point = vec![0.0; nv];
    for i in 0..m {
        if tab.basis[i] < nv {
            point[tab.basis[i]] = tab.t[i][cols].max(0.0);
        }
    }
    let objective = linalg::dot(&lp.objective, &point);
    LpSolution {
        point,
        objective,
        status: LpStatus::Optimal,
    }
}

fn simplex_rows(family: &LinearFamily, extra_vars: usize) -> Vec<LpRow> {
    let n = family.n();
    let pad = |mut v: Vec<f64>| {
        v.resize(n + extra_vars, 0.0);
        v
    };
    let mut rows = vec![LpRow::eq(pad(vec![1.0; n]), 1.0)];
    rows.extend(family.rows().iter().map(|r| LpRow::eq(pad(r.clone()), 0.0)));
    rows
}

/// Maximizes `c . P` over `simplex ∩ L`, plus any `extra` rows over `P`.
pub fn solve_lp(c: &[f64], family: &LinearFamily, extra: &[LpRow]) -> Result<LpSolution> {
    if c.len() != family.n() {
        return Err(Error::DimensionMismatch {
            expected: family.n(),
            found: c.len(),
        });
    }
    let mut rows = simplex_rows(family, 0);
    for r in extra {
        if r.coeffs.len() != family.n() {
            return Err(Error::DimensionMismatch {
                expected: family.n(),
                found: r.coeffs.len(),
            });
        }
        rows.push(r.clone());
    }
    Ok(solve_program(&LinearProgram {
        objective: c.to_vec(),
        rows,
    }))
}

/// The set of symbols charged by at least one member of the family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportSet {
    pub indices: Vec<usize>,
}

impl SupportSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.indices.binary_search(&x).is_ok()
    }
}

/// `Supp(L)`: `x` is included iff `max { P(x) : P in simplex ∩ L } > 1e-10`.
///
/// Coordinates already seen to be positive in an earlier LP optimum are not re-solved.
pub fn family_support(family: &LinearFamily) -> Result<SupportSet> {
    let n = family.n();
    let mut known = vec![false; n];
    let mut decided = vec![false; n];
    for x in 0..n {
        if decided[x] {
            continue;
        }
        let mut c = vec![0.0; n];
        c[x] = 1.0;
        let sol = solve_lp(&c, family, &[])?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::EmptyFamily);
        }
        known[x] = sol.objective > SUPPORT_TOL;
        decided[x] = true;
        for (y, &v) in sol.point.iter().enumerate() {
            if v > SUPPORT_TOL {
                known[y] = true;
                decided[y] = true;
            }
        }
    }
    Ok(SupportSet {
        indices: (0..n).filter(|&x| known[x]).collect(),
    })
}

/// A member of the family.
///
/// With `interior = false` this is a vertex of `simplex ∩ L`. With
/// `interior = true` it maximizes the smallest mass on `Supp(L)`, so every
/// symbol of `Supp(L)` gets strictly positive weight.
pub fn feasible_point(family: &LinearFamily, interior: bool) -> Result<Distribution> {
    let n = family.n();
    let point = if interior {
        let support = family_support(family)?;
        // Variables (P, t): maximize t with P(x) - t >= 0 on the support.
        let mut rows = simplex_rows(family, 1);
        for &x in &support.indices {
            let mut r = vec![0.0; n + 1];
            r[x] = 1.0;
            r[n] = -1.0;
            rows.push(LpRow::ge(r, 0.0));
        }
        for x in (0..n).filter(|&x| !support.contains(x)) {
            let mut r = vec![0.0; n + 1];
            r[x] = 1.0;
            rows.push(LpRow::eq(r, 0.0));
        }
        let mut objective = vec![0.0; n + 1];
        objective[n] = 1.0;
        let sol = solve_program(&LinearProgram { objective, rows });
        if sol.status != LpStatus::Optimal || sol.objective <= 0.0 {
            return Err(Error::EmptyFamily);
        }
        sol.point[..n].to_vec()
    } else {
        let sol = solve_lp(&vec![0.0; n], family, &[])?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::EmptyFamily);
        }
        sol.point
    };
    Ok(Distribution::from_nonnegative(&point))
}

/// True when `simplex ∩ L` is nonempty.
pub fn is_feasible(family: &LinearFamily) -> bool {
    matches!(
        solve_lp(&vec![0.0; family.n()], family, &[]),
        Ok(LpSolution {
            status: LpStatus::Optimal,
            ..
        })
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::membership_residual;

    fn counterexample() -> LinearFamily {
        LinearFamily::new(4, vec![vec![1.0, -3.0, -5.0, -6.0]]).unwrap()
    }

    #[test]
    fn lp_maximizes_third_coordinate() {
        let sol = solve_lp(&[0.0, 0.0, 1.0, 0.0], &counterexample(), &[]).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        // Witness (5/6, 0, 1/6, 0) is the optimum.
        assert!((sol.objective - 1.0 / 6.0).abs() < 1e-12);
        assert!((sol.point[0] - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn lp_detects_infeasible_normalization() {
        let fam = LinearFamily::new(4, vec![vec![-1.0; 4]]).unwrap();
        let sol = solve_lp(&[1.0, 0.0, 0.0, 0.0], &fam, &[]).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        assert!(!is_feasible(&fam));
        assert!(matches!(family_support(&fam), Err(Error::EmptyFamily)));
        assert!(matches!(
            feasible_point(&fam, true),
            Err(Error::EmptyFamily)
        ));
    }

    #[test]
    fn unconstrained_lp_hits_a_vertex() {
        let sol = solve_lp(&[1.0, 0.0, 0.0], &LinearFamily::unconstrained(3), &[]).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, 1.0);
        assert_eq!(sol.point, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn extra_rows_are_respected() {
        let sol = solve_lp(
            &[1.0, 0.0, 0.0],
            &LinearFamily::unconstrained(3),
            &[LpRow::le(vec![1.0, 0.0, 0.0], 0.4)],
        )
        .unwrap();
        assert!((sol.objective - 0.4).abs() < 1e-12);
    }

    #[test]
    fn unbounded_program() {
        let sol = solve_program(&LinearProgram {
            objective: vec![1.0, 0.0],
            rows: vec![LpRow::le(vec![-1.0, 1.0], 1.0)],
        });
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn degenerate_program_terminates() {
        // Classic cycling example under the largest-coefficient rule (Beale).
        let sol = solve_program(&LinearProgram {
            objective: vec![0.75, -150.0, 0.02, -6.0],
            rows: vec![
                LpRow::le(vec![0.25, -60.0, -0.04, 9.0], 0.0),
                LpRow::le(vec![0.5, -90.0, -0.02, 3.0], 0.0),
                LpRow::le(vec![0.0, 0.0, 1.0, 0.0], 1.0),
            ],
        });
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 0.05).abs() < 1e-12);
    }

    #[test]
    fn support_of_counterexample_is_everything() {
        assert_eq!(
            family_support(&counterexample()).unwrap().indices,
            vec![0, 1, 2, 3]
        );
        assert_eq!(
            family_support(&LinearFamily::unconstrained(3))
                .unwrap()
                .indices,
            vec![0, 1, 2]
        );
        let pinned = LinearFamily::new(3, vec![vec![0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(family_support(&pinned).unwrap().indices, vec![0, 2]);
    }

    #[test]
    fn interior_points() {
        let fam = counterexample();
        let p = feasible_point(&fam, true).unwrap();
        assert!(p.weights().iter().all(|&w| w > 0.0));
        assert!(membership_residual(&p, &fam).unwrap()[0].abs() <= 1e-10);

        let u = feasible_point(&LinearFamily::unconstrained(4), true).unwrap();
        assert!(u.max_abs_diff(&Distribution::uniform(4)) < 1e-15);

        let tie = LinearFamily::new(2, vec![vec![1.0, -1.0]]).unwrap();
        let p = feasible_point(&tie, true).unwrap();
        assert!(p.max_abs_diff(&Distribution::uniform(2)) < 1e-15);

        let v = feasible_point(&fam, false).unwrap();
        assert!(membership_residual(&v, &fam).unwrap()[0].abs() <= 1e-10);
    }
}
