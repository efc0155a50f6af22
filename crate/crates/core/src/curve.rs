//! Parametrized knots in ℝⁿ and the projection conventions.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::{Vecn, MAX_DIM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Long,
    Compact,
}

/// A differentiable curve ℝ → ℝⁿ (or ℝ/2π → ℝⁿ for compact knots).
pub trait Curve: Send + Sync {
    fn kind(&self) -> CurveKind;
    fn dim(&self) -> usize;
    /// `order`-th derivative at `t`; callers guarantee `order <= 3`.
    fn d(&self, t: f64, order: usize) -> Vecn;
    /// Parameter interval outside of which a long knot is straight.
    fn window(&self) -> (f64, f64) {
        (0.0, TAU)
    }
    /// Parameters of a polyline that resolves the curve's projection.
    fn sample_params(&self) -> Vec<f64> {
        let (a, b) = self.window();
        let n = 1024;
        let end = if self.kind() == CurveKind::Compact { n } else { n + 1 };
        (0..end).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    }
}

pub fn eval(curve: &dyn Curve, t: f64, order: usize) -> Result<Vecn> {
    if order > 3 {
        return Err(Error::UnsupportedDerivative(order));
    }
    Ok(curve.d(t, order))
}

/// p: ℝⁿ → ℝⁿ⁻¹, the quotient by `up`.
pub fn project(x: &Vecn) -> Vecn {
    let mut y = [0.0; MAX_DIM];
    y[..MAX_DIM - 1].copy_from_slice(&x[1..]);
    y
}

/// f₁(t) = p(f(t)).
pub fn project_at(curve: &dyn Curve, t: f64) -> Vecn {
    project(&curve.d(t, 0))
}

pub fn height(x: &Vecn) -> f64 {
    x[0]
}

/// `x` above `y`: equal projections and positive height difference.
pub fn above(x: &Vecn, y: &Vecn, n: usize, tol: f64) -> bool {
    (1..n).all(|i| (x[i] - y[i]).abs() <= tol) && x[0] - y[0] > 0.0
}

pub fn wrap(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Cubic spline interpolant through samples, clamped to a line outside its
/// window (long) or periodic with period 2π (compact).
#[derive(Clone, Debug)]
pub struct ParamCurve {
    kind: CurveKind,
    n: usize,
    ts: Vec<f64>,
    ys: Vec<Vecn>,
    ms: Vec<Vecn>,
    /// Standard embedding t ↦ base + t·dir (long knots only).
    tail: Option<(Vecn, Vecn)>,
}

impl ParamCurve {
    /// Long knot through `samples`; tails continue along `tail` or, if absent,
    /// along the line through the first and last samples.
    pub fn long(n: usize, samples: Vec<(f64, Vecn)>, tail: Option<(Vecn, Vecn)>) -> Result<Self> {
        check_dim(n)?;
        if samples.len() < 2 {
            return Err(Error::Input("a long knot needs at least 2 samples".into()));
        }
        check_sorted(&samples)?;
        let (t0, y0) = samples[0];
        let (t1, y1) = *samples.last().unwrap();
        let (base, dir) = match tail {
            Some(bd) => bd,
            None => {
                let mut dir = [0.0; MAX_DIM];
                let mut base = [0.0; MAX_DIM];
                for i in 0..n {
                    dir[i] = (y1[i] - y0[i]) / (t1 - t0);
                    base[i] = y0[i] - t0 * dir[i];
                }
                (base, dir)
            }
        };
        for (t, y) in [(t0, y0), (t1, y1)] {
            for i in 0..n {
                if (base[i] + t * dir[i] - y[i]).abs() > 1e-9 * (1.0 + y[i].abs()) {
                    return Err(Error::Input(format!(
                        "endpoint sample at t={t} is off the tail line"
                    )));
                }
            }
        }
        let ts: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let ys: Vec<Vecn> = samples.iter().map(|s| s.1).collect();
        let ms = clamped_moments(&ts, &ys, n, &dir);
        Ok(ParamCurve {
            kind: CurveKind::Long,
            n,
            ts,
            ys,
            ms,
            tail: Some((base, dir)),
        })
    }

    /// Compact knot; sample parameters must lie in [0, 2π).
    pub fn compact(n: usize, samples: Vec<(f64, Vecn)>) -> Result<Self> {
        check_dim(n)?;
        if samples.len() < 3 {
            return Err(Error::Input("a compact knot needs at least 3 samples".into()));
        }
        check_sorted(&samples)?;
        if samples[0].0 < 0.0 || samples.last().unwrap().0 >= TAU {
            return Err(Error::Input("compact sample parameters must lie in [0, 2π)".into()));
        }
        let ts: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let ys: Vec<Vecn> = samples.iter().map(|s| s.1).collect();
        let ms = periodic_moments(&ts, &ys, n);
        Ok(ParamCurve {
            kind: CurveKind::Compact,
            n,
            ts,
            ys,
            ms,
            tail: None,
        })
    }

    /// Sample any curve at `ts` and interpolate.
    pub fn from_curve(c: &dyn Curve, ts: &[f64]) -> Result<Self> {
        let samples = ts.iter().map(|&t| (t, c.d(t, 0))).collect();
        match c.kind() {
            CurveKind::Long => ParamCurve::long(c.dim(), samples, None),
            CurveKind::Compact => ParamCurve::compact(c.dim(), samples),
        }
    }

    pub fn samples(&self) -> Vec<(f64, Vecn)> {
        self.ts.iter().copied().zip(self.ys.iter().copied()).collect()
    }

    pub fn tail(&self) -> Option<(Vecn, Vecn)> {
        self.tail
    }

    fn segment(&self, t: f64) -> (usize, f64, f64, f64) {
        let m = self.ts.len();
        match self.kind {
            CurveKind::Long => {
                let i = self.ts.partition_point(|&x| x <= t).clamp(1, m - 1) - 1;
                (i, self.ts[i], self.ts[i + 1], t)
            }
            CurveKind::Compact => {
                let mut t = wrap(t);
                if t < self.ts[0] {
                    t += TAU;
                }
                let i = self.ts.partition_point(|&x| x <= t).clamp(1, m) - 1;
                let hi = if i + 1 < m { self.ts[i + 1] } else { self.ts[0] + TAU };
                (i, self.ts[i], hi, t)
            }
        }
    }
}

fn check_dim(n: usize) -> Result<()> {
    if (3..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::Dimension(format!("ambient dimension {n} not in 3..=5")))
    }
}

fn check_sorted(samples: &[(f64, Vecn)]) -> Result<()> {
    if samples.windows(2).all(|w| w[0].0 < w[1].0) && samples.iter().all(|s| s.0.is_finite()) {
        Ok(())
    } else {
        Err(Error::Input("sample parameters must be finite and strictly increasing".into()))
    }
}

impl Curve for ParamCurve {
    fn kind(&self) -> CurveKind {
        self.kind
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn d(&self, t: f64, order: usize) -> Vecn {
        if let Some((base, dir)) = self.tail {
            let (a, b) = (self.ts[0], *self.ts.last().unwrap());
            if t <= a || t >= b {
                let mut out = [0.0; MAX_DIM];
                for i in 0..self.n {
                    out[i] = match order {
                        0 => base[i] + t * dir[i],
                        1 => dir[i],
                        _ => 0.0,
                    };
                }
                return out;
            }
        }
        let (i, lo, hi, t) = self.segment(t);
        let j = if i + 1 < self.ts.len() { i + 1 } else { 0 };
        let h = hi - lo;
        let (u, v) = (hi - t, t - lo);
        let mut out = [0.0; MAX_DIM];
        for k in 0..self.n {
            let (m0, m1) = (self.ms[i][k], self.ms[j][k]);
            let (y0, y1) = (self.ys[i][k], self.ys[j][k]);
            let c0 = y0 / h - m0 * h / 6.0;
            let c1 = y1 / h - m1 * h / 6.0;
            out[k] = match order {
                0 => m0 * u * u * u / (6.0 * h) + m1 * v * v * v / (6.0 * h) + c0 * u + c1 * v,
                1 => -m0 * u * u / (2.0 * h) + m1 * v * v / (2.0 * h) - c0 + c1,
                2 => (m0 * u + m1 * v) / h,
                _ => (m1 - m0) / h,
            };
        }
        out
    }

    fn window(&self) -> (f64, f64) {
        match self.kind {
            CurveKind::Long => (self.ts[0], *self.ts.last().unwrap()),
            CurveKind::Compact => (0.0, TAU),
        }
    }

    fn sample_params(&self) -> Vec<f64> {
        let sub = 4;
        let m = self.ts.len();
        let segs = if self.kind == CurveKind::Compact { m } else { m - 1 };
        let mut out = Vec::with_capacity(segs * sub + 1);
        for i in 0..segs {
            let lo = self.ts[i];
            let hi = if i + 1 < m { self.ts[i + 1] } else { self.ts[0] + TAU };
            for k in 0..sub {
                let t = lo + (hi - lo) * k as f64 / sub as f64;
                out.push(if self.kind == CurveKind::Compact { wrap(t) } else { t });
            }
        }
        if self.kind == CurveKind::Long {
            out.push(self.ts[m - 1]);
        } else {
            out.sort_by(f64::total_cmp);
        }
        out
    }
}

fn clamped_moments(ts: &[f64], ys: &[Vecn], n: usize, slope: &Vecn) -> Vec<Vecn> {
    let m = ts.len();
    let h: Vec<f64> = ts.windows(2).map(|w| w[1] - w[0]).collect();
    let mut out = vec![[0.0; MAX_DIM]; m];
    for k in 0..n {
        let mut sub = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut sup = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        diag[0] = 2.0 * h[0];
        sup[0] = h[0];
        rhs[0] = 6.0 * ((ys[1][k] - ys[0][k]) / h[0] - slope[k]);
        for i in 1..m - 1 {
            sub[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * ((ys[i + 1][k] - ys[i][k]) / h[i] - (ys[i][k] - ys[i - 1][k]) / h[i - 1]);
        }
        sub[m - 1] = h[m - 2];
        diag[m - 1] = 2.0 * h[m - 2];
        rhs[m - 1] = 6.0 * (slope[k] - (ys[m - 1][k] - ys[m - 2][k]) / h[m - 2]);
        let x = thomas(&sub, &diag, &sup, &rhs);
        for i in 0..m {
            out[i][k] = x[i];
        }
    }
    out
}

fn periodic_moments(ts: &[f64], ys: &[Vecn], n: usize) -> Vec<Vecn> {
    let m = ts.len();
    let h: Vec<f64> = (0..m)
        .map(|i| if i + 1 < m { ts[i + 1] - ts[i] } else { ts[0] + TAU - ts[i] })
        .collect();
    let mut out = vec![[0.0; MAX_DIM]; m];
    for k in 0..n {
        let mut sub = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut sup = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        for i in 0..m {
            let p = (i + m - 1) % m;
            let q = (i + 1) % m;
            sub[i] = h[p];
            diag[i] = 2.0 * (h[p] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * ((ys[q][k] - ys[i][k]) / h[i] - (ys[i][k] - ys[p][k]) / h[p]);
        }
        let x = cyclic_thomas(&sub, &diag, &sup, &rhs);
        for i in 0..m {
            out[i][k] = x[i];
        }
    }
    out
}

/// Tridiagonal solve; `sub[0]` and `sup[m-1]` are ignored.
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..m {
        let den = diag[i] - sub[i] * c[i - 1];
        c[i] = if i + 1 < m { sup[i] / den } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / den;
    }
    let mut x = vec![0.0; m];
    x[m - 1] = d[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Cyclic tridiagonal solve (corners `sub[0]`, `sup[m-1]`) by Sherman–Morrison.
fn cyclic_thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let m = diag.len();
    let alpha = sup[m - 1];
    let beta = sub[0];
    let gamma = -diag[0];
    let mut bb = diag.to_vec();
    bb[0] -= gamma;
    bb[m - 1] -= alpha * beta / gamma;
    let x = thomas(sub, &bb, sup, rhs);
    let mut u = vec![0.0; m];
    u[0] = gamma;
    u[m - 1] = alpha;
    let z = thomas(sub, &bb, sup, &u);
    let fact = (x[0] + beta * x[m - 1] / gamma) / (1.0 + z[0] + beta * z[m - 1] / gamma);
    x.iter().zip(&z).map(|(a, b)| a - fact * b).collect()
}

/// A closed curve given coordinate-wise by finite trigonometric series
/// Σ aₖ cos(kt) + bₖ sin(kt); derivatives are exact.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrigCurve {
    pub n: usize,
    /// Per coordinate: (k, aₖ, bₖ) terms.
    pub terms: Vec<Vec<(u32, f64, f64)>>,
}

impl TrigCurve {
    pub fn new(terms: Vec<Vec<(u32, f64, f64)>>) -> Self {
        TrigCurve {
            n: terms.len(),
            terms,
        }
    }
}

impl Curve for TrigCurve {
    fn kind(&self) -> CurveKind {
        CurveKind::Compact
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn d(&self, t: f64, order: usize) -> Vecn {
        let mut out = [0.0; MAX_DIM];
        for (i, terms) in self.terms.iter().enumerate() {
            let mut acc = 0.0;
            for &(k, a, b) in terms {
                let kf = k as f64;
                let (s, c) = (kf * t).sin_cos();
                let p = kf.powi(order as i32);
                acc += p * match order % 4 {
                    0 => a * c + b * s,
                    1 => -a * s + b * c,
                    2 => -a * c - b * s,
                    _ => a * s - b * c,
                };
            }
            out[i] = acc;
        }
        out
    }

    fn sample_params(&self) -> Vec<f64> {
        let kmax = self
            .terms
            .iter()
            .flatten()
            .map(|t| t.0)
            .max()
            .unwrap_or(1)
            .max(1) as usize;
        let n = (256 * kmax).max(512);
        (0..n).map(|i| TAU * i as f64 / n as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> TrigCurve {
        TrigCurve::new(vec![vec![], vec![(1, 1.0, 0.0)], vec![(1, 0.0, 1.0)]])
    }

    #[test]
    fn circle_tangent_is_unit_and_orthogonal() {
        let c = circle();
        let p = c.d(0.0, 0);
        let v = c.d(0.0, 1);
        assert!((crate::linalg::norm(&v) - 1.0).abs() < 1e-15);
        assert!(crate::linalg::dot(&p, &v).abs() < 1e-15);
    }

    #[test]
    fn projection_drops_up() {
        let x = [5.0, 1.0, 2.0, 0.0, 0.0];
        assert_eq!(&project(&x)[..2], &[1.0, 2.0]);
        assert!(above(&[1.0, 0.0, 0.0, 0.0, 0.0], &[0.0; 5], 3, 0.0));
        assert!(eval(&circle(), 0.0, 4).is_err());
    }

    #[test]
    fn periodic_spline_reproduces_samples_and_period() {
        let c = circle();
        let ts: Vec<f64> = (0..40).map(|i| TAU * i as f64 / 40.0).collect();
        let s = ParamCurve::from_curve(&c, &ts).unwrap();
        for &t in &ts {
            let (a, b) = (s.d(t, 0), c.d(t, 0));
            assert!((a[1] - b[1]).abs() < 1e-14 && (a[2] - b[2]).abs() < 1e-14);
        }
        let (a, b) = (s.d(0.3, 1), s.d(0.3 + TAU, 1));
        assert!((a[1] - b[1]).abs() < 1e-12);
        assert!((s.d(1.0, 0)[1] - 1.0f64.cos()).abs() < 1e-5);
    }

    #[test]
    fn long_spline_is_straight_outside_window() {
        let samples: Vec<(f64, Vecn)> = (0..=10)
            .map(|i| {
                let t = i as f64 / 10.0;
                let bump = 16.0 * (t * (1.0 - t)).powi(2);
                (t, [bump, t, 0.3 * bump, 0.0, 0.0])
            })
            .collect();
        let c = ParamCurve::long(3, samples, None).unwrap();
        for t in [-3.0, -0.001, 1.0, 7.5] {
            let p = c.d(t, 0);
            assert_eq!(p[0], 0.0);
            assert_eq!(p[1], t);
            assert_eq!(p[2], 0.0);
        }
    }
}
