//! Exact Horn density for SU(n), n in {2, 3, 4}.
//!
//! J(alpha, beta; gamma) is a signed sum over pairs of permutations of
//! iterated principal-value Dirichlet integrals.  The rational function
//! 1/Delta~(u) = prod_{i<j} 1/(u_i + ... + u_{j-1}) is split once per n into
//! terms prod_s w_s(u)^{-r_s} whose linear forms w_s are unitriangular in u;
//! the substitution v = M u then turns every term into a product of
//! one-dimensional integrals  P int dv / v^r e^{i v B} = i pi (iB)^{r-1}/(r-1)! sign(B)
//! with B = M^{-T} A.

use crate::error::{check_len, HornError, Result};
use crate::exec::{map_indexed, Execution};
use crate::scalar::{int, Scalar};
use crate::spectra::{vandermonde, Spectrum};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::OnceLock;

/// One factor w_s(u)^{-r_s} of a partial-fraction term.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletFactor {
    pub power: u32,
    /// Coefficients of w_s in u_1..u_{n-1}; leading coefficient 1 at position s.
    pub form: Vec<BigRational>,
    /// Coefficients of B_s in A_1..A_{n-1}.
    pub argument: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirichletTerm {
    pub coefficient: BigRational,
    pub factors: Vec<DirichletFactor>,
}

impl DirichletTerm {
    /// Value of coefficient * prod w_s(u)^{-r_s} at a point u.
    pub fn eval_at(&self, u: &[BigRational]) -> BigRational {
        let mut v = self.coefficient.clone();
        for f in &self.factors {
            let w: BigRational = f.form.iter().zip(u).map(|(c, x)| c * x).sum();
            v /= num_traits::pow(w, f.power as usize);
        }
        v
    }
}

type Form = Vec<BigRational>;

fn canonical(form: Form) -> (BigRational, Form) {
    let lead = form
        .iter()
        .find(|c| !c.is_zero())
        .cloned()
        .expect("zero linear form");
    let scaled = form.into_iter().map(|c| c / &lead).collect();
    (lead, scaled)
}

/// Partial fractions of 1/Delta~(u) for su(n) by eliminating u_1, u_2, ...
/// in turn with 1/(ab) = (1/a - 1/b)/(b - a).
pub fn build_dirichlet_table(n: usize) -> Vec<DirichletTerm> {
    assert!(n >= 2);
    let m = n - 1;
    let mut factors: BTreeMap<Form, u32> = BTreeMap::new();
    for i in 0..m {
        for j in i..m {
            let f = (0..m)
                .map(|k| if (i..=j).contains(&k) { int(1) } else { int(0) })
                .collect();
            *factors.entry(f).or_default() += 1;
        }
    }
    type Partial = (BigRational, BTreeMap<Form, u32>, Vec<(Form, u32)>);
    let mut terms: Vec<Partial> = vec![(BigRational::one(), factors, Vec::new())];
    for t in 0..m {
        let mut done_terms = Vec::new();
        let mut stack = terms;
        while let Some((coef, facs, done)) = stack.pop() {
            let involved: Vec<&Form> = facs.keys().filter(|f| !f[t].is_zero()).collect();
            if involved.len() == 1 {
                let f = involved[0].clone();
                let mut rest = facs.clone();
                let r = rest.remove(&f).unwrap();
                let mut done = done;
                done.push((f, r));
                done_terms.push((coef, rest, done));
                continue;
            }
            let (a, b) = (involved[0].clone(), involved[1].clone());
            let diff: Form = b.iter().zip(&a).map(|(x, y)| x - y).collect();
            let (scale, diff) = canonical(diff);
            for (which, sign) in [(&b, 1i64), (&a, -1i64)] {
                let mut nf = facs.clone();
                let e = nf.get_mut(which).unwrap();
                *e -= 1;
                if *e == 0 {
                    nf.remove(which);
                }
                *nf.entry(diff.clone()).or_default() += 1;
                stack.push((&coef * int(sign) / &scale, nf, done.clone()));
            }
        }
        terms = done_terms;
    }
    terms
        .into_iter()
        .map(|(coefficient, rest, done)| {
            debug_assert!(rest.is_empty());
            let rows: Vec<Form> = done.iter().map(|(f, _)| f.clone()).collect();
            let inv = unitriangular_inverse(&rows);
            let factors = done
                .into_iter()
                .enumerate()
                .map(|(s, (form, power))| DirichletFactor {
                    power,
                    form,
                    // row s of M^{-T} is column s of M^{-1}
                    argument: (0..m).map(|j| inv[j][s].clone()).collect(),
                })
                .collect();
            DirichletTerm {
                coefficient,
                factors,
            }
        })
        .collect()
}

/// Inverse of an upper unitriangular matrix given by rows.
fn unitriangular_inverse(rows: &[Form]) -> Vec<Form> {
    let m = rows.len();
    let mut inv = vec![vec![BigRational::zero(); m]; m];
    for col in 0..m {
        for r in (0..m).rev() {
            let mut v = if r == col {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            for k in r + 1..m {
                v -= &rows[r][k] * &inv[k][col];
            }
            inv[r][col] = v / &rows[r][r];
        }
    }
    inv
}

/// Cached table for su(n), n in 2..=4.
pub fn dirichlet_table(n: usize) -> &'static [DirichletTerm] {
    static TABLES: [OnceLock<Vec<DirichletTerm>>; 3] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    assert!((2..=4).contains(&n), "tables exist for n = 2, 3, 4");
    TABLES[n - 2].get_or_init(|| build_dirichlet_table(n))
}

/// Scalars the table can be converted into.
pub trait TableScalar: Scalar {
    fn from_rational(r: &BigRational) -> Self;
}

impl TableScalar for f64 {
    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

impl TableScalar for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
}

struct Factor<T> {
    power: u32,
    inv_factorial: T,
    argument: Vec<T>,
    /// Derivative of B along the tie-break direction.
    slope: T,
}

struct Term<T> {
    coefficient: T,
    factors: Vec<Factor<T>>,
}

/// Partial sums S_j of the tie-break direction d in gamma: S_j = 1000^{-j}.
/// Since dA_j = -S_j and all table coefficients are small integers, B is
/// never stationary along d unless it is independent of gamma.
fn tie_break_partial_sums<T: TableScalar>(m: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(m);
    let mut s = T::one();
    for _ in 0..m {
        s = s / T::from_i64(1000);
        out.push(s.clone());
    }
    out
}

fn converted_table<T: TableScalar>(n: usize) -> Vec<Term<T>> {
    let m = n - 1;
    let partial = tie_break_partial_sums::<T>(m);
    dirichlet_table(n)
        .iter()
        .map(|t| Term {
            coefficient: T::from_rational(&t.coefficient),
            factors: t
                .factors
                .iter()
                .map(|f| {
                    let argument: Vec<T> = f.argument.iter().map(T::from_rational).collect();
                    let slope = argument
                        .iter()
                        .zip(&partial)
                        .fold(T::zero(), |acc, (c, s)| acc - c.clone() * s.clone());
                    let mut fact = T::one();
                    for k in 1..f.power {
                        fact = fact * T::from_i64(k as i64);
                    }
                    Factor {
                        power: f.power,
                        inv_factorial: T::one() / fact,
                        argument,
                        slope,
                    }
                })
                .collect(),
        })
        .collect()
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, i64)>) {
        let n = used.len();
        if cur.len() == n {
            let mut sign = 1;
            for i in 0..n {
                for j in i + 1..n {
                    if cur[i] > cur[j] {
                        sign = -sign;
                    }
                }
            }
            out.push((cur.clone(), sign));
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn sign_of<T: Scalar>(v: &T) -> i64 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// J together with a flag telling whether gamma sits on a wall, where the
/// value is the mean of the two one-sided limits along a fixed generic
/// direction.
#[derive(Clone, Debug, PartialEq)]
pub struct JValue<T> {
    pub value: T,
    pub on_wall: bool,
}

/// J(alpha, beta; gamma) for n in {2, 3, 4}; exact when `T` is rational.
pub fn j_function<T: TableScalar>(alpha: &[T], beta: &[T], gamma: &[T]) -> Result<JValue<T>> {
    let n = alpha.len();
    check_len(n, beta.len())?;
    check_len(n, gamma.len())?;
    if !(2..=4).contains(&n) {
        return Err(HornError::InvalidArgument(format!(
            "J is tabulated for n = 2, 3, 4 (got {n})"
        )));
    }
    let scale = alpha
        .iter()
        .chain(beta)
        .chain(gamma)
        .fold(0.0f64, |m, v| m.max(v.as_f64().abs()));
    let sum = |v: &[T]| v.iter().fold(T::zero(), |a, b| a + b.clone());
    let defect = sum(alpha) + sum(beta) - sum(gamma);
    if !defect.is_negligible(scale) {
        return Err(HornError::SumMismatch {
            left: (sum(alpha) + sum(beta)).as_f64(),
            right: sum(gamma).as_f64(),
        });
    }
    let m = n - 1;
    let table = converted_table::<T>(n);
    let perms = permutations(n);
    let mut plus = T::zero();
    let mut minus = T::zero();
    let mut on_wall = false;
    let mut a = vec![T::zero(); m];
    for (p, sp) in &perms {
        for (q, sq) in &perms {
            let mut acc = T::zero();
            for k in 0..m {
                acc = acc + alpha[p[k]].clone() + beta[q[k]].clone() - gamma[k].clone();
                a[k] = acc.clone();
            }
            let eps = sp * sq;
            for term in &table {
                let mut mag = term.coefficient.clone();
                let (mut sign_p, mut sign_m) = (eps, eps);
                for f in &term.factors {
                    let b = f
                        .argument
                        .iter()
                        .zip(&a)
                        .fold(T::zero(), |s, (c, x)| s + c.clone() * x.clone());
                    let (e_p, e_m) = if b.is_negligible(scale) {
                        on_wall = true;
                        let d = sign_of(&f.slope);
                        (d, -d)
                    } else {
                        let e = sign_of(&b);
                        (e, e)
                    };
                    sign_p *= e_p;
                    sign_m *= e_m;
                    if sign_p == 0 && sign_m == 0 {
                        break;
                    }
                    if f.power > 1 {
                        let b = if b.is_negligible(scale) { T::zero() } else { b };
                        let mut pw = T::one();
                        for _ in 1..f.power {
                            pw = pw * b.clone();
                        }
                        mag = mag * pw * f.inv_factorial.clone();
                    }
                }
                if sign_p != 0 {
                    plus = plus + mag.clone() * T::from_i64(sign_p);
                }
                if sign_m != 0 {
                    minus = minus + mag * T::from_i64(sign_m);
                }
            }
        }
    }
    let two_m = T::from_i64(1i64 << m);
    let value = (plus + minus) / (T::from_i64(2) * two_m);
    Ok(JValue { value, on_wall })
}

/// Density value with the wall flag of the underlying J.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdfValue {
    pub value: f64,
    pub on_wall: bool,
}

fn superfactorial(n: usize) -> f64 {
    (1..n)
        .fold((1.0, 1.0), |(prod, f), p| {
            (prod * f * p as f64, f * p as f64)
        })
        .0
}

/// Density of the sorted spectrum (gamma_1, ..., gamma_{n-1}) of A + B:
/// prod_{p<n} p! Delta(gamma) / (Delta(alpha) Delta(beta)) J(alpha, beta; gamma).
pub fn pdf_su(alpha: &Spectrum, beta: &Spectrum, gamma: &Spectrum) -> Result<PdfValue> {
    pdf_su_values(alpha.values(), beta.values(), gamma.values())
}

/// [`pdf_su`] on raw slices; gamma must be weakly decreasing or the density is 0.
pub fn pdf_su_values(alpha: &[f64], beta: &[f64], gamma: &[f64]) -> Result<PdfValue> {
    let n = alpha.len();
    check_len(n, beta.len())?;
    check_len(n, gamma.len())?;
    let da = vandermonde(alpha);
    let db = vandermonde(beta);
    if da == 0.0 || db == 0.0 {
        return Err(HornError::DegenerateSpectrum);
    }
    if gamma.windows(2).any(|w| w[0] < w[1]) {
        return Ok(PdfValue {
            value: 0.0,
            on_wall: false,
        });
    }
    let j = j_function(alpha, beta, gamma)?;
    let value = superfactorial(n) * vandermonde(gamma) / (da * db) * j.value;
    Ok(PdfValue {
        value: value.max(0.0),
        on_wall: j.on_wall,
    })
}

/// Values of the n=3 density on a regular grid of cell centres.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma1_range: (f64, f64),
    pub gamma2_range: (f64, f64),
    pub resolution: usize,
    /// Row-major in gamma_1.
    pub values: Vec<f64>,
    pub wall_cells: usize,
}

impl DensityGrid {
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        let (x0, x1) = self.gamma1_range;
        let (y0, y1) = self.gamma2_range;
        let r = self.resolution as f64;
        (
            x0 + (i as f64 + 0.5) * (x1 - x0) / r,
            y0 + (j as f64 + 0.5) * (y1 - y0) / r,
        )
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.resolution + j]
    }

    /// CSV with header `gamma1,gamma2,pdf`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("gamma1,gamma2,pdf\n");
        for i in 0..self.resolution {
            for j in 0..self.resolution {
                let (x, y) = self.point(i, j);
                s.push_str(&format!("{x},{y},{}\n", self.value(i, j)));
            }
        }
        s
    }
}

/// Bounding box of the n=3 Horn polygon from the Weyl inequalities.
pub fn horn_box(alpha: &[f64], beta: &[f64]) -> ((f64, f64), (f64, f64)) {
    let (a, b) = (alpha, beta);
    let g1 = ((a[0] + b[2]).max(a[2] + b[0]).max(a[1] + b[1]), a[0] + b[0]);
    let g2 = (
        (a[1] + b[2]).max(a[2] + b[1]),
        (a[0] + b[1]).min(a[1] + b[0]),
    );
    (g1, g2)
}

/// Grid of pdf_su over the Horn box padded by 5% on every side.
pub fn density_grid(
    alpha: &Spectrum,
    beta: &Spectrum,
    resolution: usize,
    exec: Execution,
) -> Result<DensityGrid> {
    check_len(3, alpha.n())?;
    check_len(3, beta.n())?;
    if resolution == 0 || resolution > 2000 {
        return Err(HornError::InvalidArgument(
            "resolution must be in 1..=2000".into(),
        ));
    }
    let (a, b) = (alpha.values().to_vec(), beta.values().to_vec());
    if vandermonde(&a) == 0.0 || vandermonde(&b) == 0.0 {
        return Err(HornError::DegenerateSpectrum);
    }
    let pad = |(lo, hi): (f64, f64)| {
        let w = (hi - lo).max(1e-9) * 0.05;
        (lo - w, hi + w)
    };
    let (r1, r2) = horn_box(&a, &b);
    let mut grid = DensityGrid {
        alpha: a.clone(),
        beta: b.clone(),
        gamma1_range: pad(r1),
        gamma2_range: pad(r2),
        resolution,
        values: Vec::new(),
        wall_cells: 0,
    };
    let trace = a.iter().sum::<f64>() + b.iter().sum::<f64>();
    let rows = map_indexed(exec, resolution, |i| {
        (0..resolution)
            .map(|j| {
                let (x, y) = grid.point(i, j);
                let g = [x, y, trace - x - y];
                if weyl_outside(&a, &b, &g) {
                    return Ok(PdfValue {
                        value: 0.0,
                        on_wall: false,
                    });
                }
                pdf_su_values(&a, &b, &g)
            })
            .collect::<Result<Vec<_>>>()
    });
    for row in rows {
        for v in row? {
            grid.wall_cells += v.on_wall as usize;
            grid.values.push(v.value);
        }
    }
    Ok(grid)
}

fn weyl_outside(a: &[f64], b: &[f64], g: &[f64]) -> bool {
    g.windows(2).any(|w| w[0] < w[1]) || !crate::spectra::weyl_violations(a, b, g, 1e-12).is_empty()
}

/// Exact J on rational inputs.
pub fn j_exact(
    alpha: &[BigRational],
    beta: &[BigRational],
    gamma: &[BigRational],
) -> Result<JValue<BigRational>> {
    j_function(alpha, beta, gamma)
}

/// Absolute value helper for rational residuals.
pub fn rational_abs(r: &BigRational) -> BigRational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn table_sizes() {
        assert_eq!(dirichlet_table(2).len(), 1);
        assert_eq!(dirichlet_table(3).len(), 2);
        assert_eq!(dirichlet_table(4).len(), 18);
    }

    #[test]
    fn tables_reconstruct_inverse_delta() {
        for n in 2..=4 {
            let m = n - 1;
            for seed in 1..6i64 {
                let u: Vec<BigRational> = (0..m)
                    .map(|k| rat(seed * 7 + 3 * k as i64 + 1, 5 + k as i64))
                    .collect();
                let lhs: BigRational = dirichlet_table(n).iter().map(|t| t.eval_at(&u)).sum();
                let mut rhs = BigRational::one();
                for i in 0..m {
                    for j in i..m {
                        rhs /= u[i..=j].iter().cloned().sum::<BigRational>();
                    }
                }
                assert_eq!(lhs, rhs, "n={n}");
            }
        }
    }

    #[test]
    fn su2_indicator() {
        let a = [int(1), int(-1)];
        assert_eq!(j_exact(&a, &a, &a).unwrap().value, int(1));
        assert_eq!(
            j_exact(&a, &a, &[rat(5, 2), rat(-5, 2)]).unwrap().value,
            int(0)
        );
    }

    #[test]
    fn su3_values() {
        let w = [int(2), int(0), int(-2)];
        assert_eq!(j_exact(&w, &w, &w).unwrap().value, int(2));
        let a = [int(1), int(0), int(-1)];
        assert_eq!(
            j_exact(&a, &a, &[int(5), int(0), int(-5)]).unwrap().value,
            int(0)
        );
        let f = j_function(&[1.0, 0.0, -1.0], &[1.0, 0.0, -1.0], &[5.0, 0.0, -5.0]).unwrap();
        assert_eq!(f.value, 0.0);
    }

    #[test]
    fn float_and_exact_agree() {
        let a = [rat(11, 1), rat(-1, 1), rat(-10, 1)];
        let b = [rat(7, 1), rat(4, 1), rat(-11, 1)];
        let g = [
            rat(23, 2),
            rat(3, 7),
            int(-1) - rat(23, 2) - rat(3, 7) + int(1),
        ];
        let e = j_exact(&a, &b, &g).unwrap();
        let f = j_function(
            &a.iter().map(|x| x.to_f64().unwrap()).collect::<Vec<_>>(),
            &b.iter().map(|x| x.to_f64().unwrap()).collect::<Vec<_>>(),
            &g.iter().map(|x| x.to_f64().unwrap()).collect::<Vec<_>>(),
        )
        .unwrap();
        assert!((e.value.to_f64().unwrap() - f.value).abs() < 1e-9);
        assert!(!e.on_wall);
    }

    #[test]
    fn su2_density_closed_form() {
        let a = Spectrum::new(vec![1.0, -1.0], true).unwrap();
        let g = Spectrum::new(vec![0.6, -0.6], true).unwrap();
        let p = pdf_su(&a, &a, &g).unwrap();
        assert!((p.value - 0.3).abs() < 1e-14);
    }
}
