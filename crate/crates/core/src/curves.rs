//! Legendrian curves: lifts, trajectory classification, tracing and
//! q-length quadrature.
//!
//! A C^1 curve gamma = (gamma_1, gamma_2) is Legendrian iff
//! gamma_2' = -2 Im(conj(gamma_1) gamma_1'). A Legendrian curve is a
//! horizontal (vertical) trajectory of q when q(gamma') = q(gamma) gamma_1'^2
//! is positive (negative) along it. The q-length is
//! int sqrt(|q(gamma(s))|) |gamma_1'(s)| ds.

use crate::error::Error;
use crate::heis::HPoint;
use crate::qc::ContactMap;
use crate::quad_diff::{QuadDiff, BRANCH_FLOOR};
use crate::quadrature;
use crate::C64;
use std::sync::Arc;

/// Position and velocity of one curve sample.
#[derive(Debug, Clone, Copy)]
pub struct CurveSample {
    pub s: f64,
    pub point: HPoint,
    pub vel_z: C64,
    pub vel_t: f64,
}

/// Parametric closure returning (z, t, dz/ds, dt/ds).
pub type ParamFn = Arc<dyn Fn(f64) -> (C64, f64, C64, f64) + Send + Sync>;

/// A sampled Legendrian curve; analytic curves also keep their parametric
/// closure so that line quadratures can refine freely.
#[derive(Clone)]
pub struct LegendrianCurve {
    pub samples: Vec<CurveSample>,
    param: Option<(ParamFn, f64, f64)>,
}

impl std::fmt::Debug for LegendrianCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LegendrianCurve({} samples)", self.samples.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Horizontal,
    Vertical,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    Horizontal,
    Vertical,
}

impl LegendrianCurve {
    pub fn from_samples(samples: Vec<CurveSample>) -> Self {
        Self { samples, param: None }
    }

    /// Sample a parametric curve uniformly over [s0, s1].
    pub fn from_param(f: ParamFn, s0: f64, s1: f64, n: usize) -> Self {
        let samples = (0..=n)
            .map(|i| {
                let s = s0 + (s1 - s0) * i as f64 / n as f64;
                let (z, t, dz, dt) = f(s);
                CurveSample { s, point: HPoint::new(z, t), vel_z: dz, vel_t: dt }
            })
            .collect();
        Self { samples, param: Some((f, s0, s1)) }
    }

    pub fn start(&self) -> HPoint {
        self.samples.first().expect("empty curve").point
    }

    pub fn end(&self) -> HPoint {
        self.samples.last().expect("empty curve").point
    }

    /// Max of |gamma_2' + 2 Im(conj(gamma_1) gamma_1')| over the samples.
    pub fn legendrian_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|c| (c.vel_t + 2.0 * (c.point.z.conj() * c.vel_z).im).abs())
            .fold(0.0, f64::max)
    }

    /// Integral of g(point, vel_z) ds over the curve: refinable Gauss panels
    /// for parametric curves, Simpson on the stored samples otherwise.
    fn line_integral(&self, g: impl Fn(HPoint, C64) -> f64) -> f64 {
        if let Some((f, s0, s1)) = &self.param {
            let panels = (self.samples.len() / 4).clamp(32, 512);
            return quadrature::integrate_composite(
                |s| {
                    let (z, t, dz, _) = f(s);
                    g(HPoint::new(z, t), dz)
                },
                *s0,
                *s1,
                8,
                panels,
            );
        }
        // composite Simpson over uniform samples
        let n = self.samples.len();
        if n < 2 {
            return 0.0;
        }
        let vals: Vec<f64> = self
            .samples
            .iter()
            .map(|c| g(c.point, c.vel_z))
            .collect();
        let h = (self.samples[n - 1].s - self.samples[0].s) / (n - 1) as f64;
        let mut acc = 0.0;
        let m = (n - 1) / 2 * 2; // largest even panel count
        for i in (0..m).step_by(2) {
            acc += h / 3.0 * (vals[i] + 4.0 * vals[i + 1] + vals[i + 2]);
        }
        if m < n - 1 {
            acc += 0.5 * h * (vals[n - 2] + vals[n - 1]);
        }
        acc
    }

    /// Horizontal arclength int |gamma_1'| ds.
    pub fn horizontal_arclength(&self) -> f64 {
        self.line_integral(|_, dz| dz.norm())
    }

    /// q-length int sqrt(|q|) |gamma_1'| ds.
    pub fn q_length(&self, q: &QuadDiff) -> f64 {
        self.line_integral(|p, dz| q.eval(p).norm().sqrt() * dz.norm())
    }

    /// Line integral of a density, int rho(gamma) |gamma_1'| ds.
    pub fn density_integral(&self, rho: &crate::qc::Density) -> f64 {
        self.line_integral(|p, dz| rho.eval(p) * dz.norm())
    }

    /// Trajectory type of the curve for q: horizontal iff Re q(gamma') > 0
    /// and |Im| <= tol * max(1, |Re|) at every sample, vertical for Re < 0.
    pub fn classify(&self, q: &QuadDiff, tol: f64) -> Classification {
        let mut horizontal = true;
        let mut vertical = true;
        for c in &self.samples {
            let v = q.on_velocity(c.point, c.vel_z);
            let im_ok = v.im.abs() <= tol * v.re.abs().max(1.0);
            horizontal &= v.re > 0.0 && im_ok;
            vertical &= v.re < 0.0 && im_ok;
        }
        match (horizontal, vertical) {
            (true, _) => Classification::Horizontal,
            (_, true) => Classification::Vertical,
            _ => Classification::Neither,
        }
    }

    /// Push the curve through a map, velocities via the map's jets.
    pub fn map_through(&self, f: &ContactMap) -> LegendrianCurve {
        let push = |c: &CurveSample| {
            let j1 = f.f1.eval_jet(c.point);
            let j2 = f.f2.eval_jet(c.point);
            let (vx, vy) = (c.vel_z.re, c.vel_z.im);
            let vel_z = j1.g[0] * vx + j1.g[1] * vy + j1.g[2] * c.vel_t;
            let vel_t = (j2.g[0] * vx + j2.g[1] * vy + j2.g[2] * c.vel_t).re;
            (HPoint::new(j1.v, j2.v.re), vel_z, vel_t)
        };
        if let Some((p, s0, s1)) = &self.param {
            let p = p.clone();
            let fm = f.clone();
            let n = self.samples.len() - 1;
            let param: ParamFn = Arc::new(move |s| {
                let (z, t, dz, dt) = p(s);
                let sample = CurveSample {
                    s,
                    point: HPoint::new(z, t),
                    vel_z: dz,
                    vel_t: dt,
                };
                let j1 = fm.f1.eval_jet(sample.point);
                let j2 = fm.f2.eval_jet(sample.point);
                let vz = j1.g[0] * dz.re + j1.g[1] * dz.im + j1.g[2] * dt;
                let vt = (j2.g[0] * dz.re + j2.g[1] * dz.im + j2.g[2] * dt).re;
                (j1.v, j2.v.re, vz, vt)
            });
            return LegendrianCurve::from_param(param, *s0, *s1, n);
        }
        let samples = self
            .samples
            .iter()
            .map(|c| {
                let (point, vel_z, vel_t) = push(c);
                CurveSample { s: c.s, point, vel_z, vel_t }
            })
            .collect();
        LegendrianCurve::from_samples(samples)
    }

    /// Cumulative horizontal arclength at each sample (trapezoid).
    fn cumulative_arclength(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.samples.len()];
        for i in 1..self.samples.len() {
            let a = &self.samples[i - 1];
            let b = &self.samples[i];
            acc[i] = acc[i - 1] + 0.5 * (a.vel_z.norm() + b.vel_z.norm()) * (b.s - a.s);
        }
        acc
    }
}

/// Sup of the R^3 distance between the two curves after aligning them by
/// cumulative horizontal arclength from their start points.
pub fn sup_distance_aligned(a: &LegendrianCurve, b: &LegendrianCurve) -> f64 {
    let la = a.cumulative_arclength();
    let lb = b.cumulative_arclength();
    let lmax = la.last().unwrap().min(*lb.last().unwrap());
    let interp = |curve: &LegendrianCurve, ls: &[f64], l: f64| -> (C64, f64) {
        let idx = ls.partition_point(|&v| v < l).clamp(1, ls.len() - 1);
        let (l0, l1) = (ls[idx - 1], ls[idx]);
        let w = if l1 > l0 { (l - l0) / (l1 - l0) } else { 0.0 };
        let p0 = curve.samples[idx - 1].point;
        let p1 = curve.samples[idx].point;
        (p0.z + w * (p1.z - p0.z), p0.t + w * (p1.t - p0.t))
    };
    let mut sup = 0.0f64;
    let n = 400;
    for i in 0..=n {
        let l = lmax * i as f64 / n as f64;
        let (za, ta) = interp(a, &la, l);
        let (zb, tb) = interp(b, &lb, l);
        sup = sup.max(((za - zb).norm_sqr() + (ta - tb) * (ta - tb)).sqrt());
    }
    sup
}

/// Lift a planar curve to the Legendrian curve over it:
/// gamma_2(s) = t0 - int_s0^s 2 Im(conj(z) z') du.
pub fn legendrian_lift(
    z_curve: impl Fn(f64) -> (C64, C64) + Send + Sync + 'static,
    t0: f64,
    s0: f64,
    s1: f64,
    n: usize,
) -> LegendrianCurve {
    let mut samples = Vec::with_capacity(n + 1);
    let h = (s1 - s0) / n as f64;
    let mut t = t0;
    let integrand = |s: f64| {
        let (z, dz) = z_curve(s);
        -2.0 * (z.conj() * dz).im
    };
    for i in 0..=n {
        let s = s0 + i as f64 * h;
        let (z, dz) = z_curve(s);
        samples.push(CurveSample {
            s,
            point: HPoint::new(z, t),
            vel_z: dz,
            vel_t: integrand(s),
        });
        if i < n {
            t += quadrature::integrate(integrand, s, s + h, 8);
        }
    }
    LegendrianCurve::from_samples(samples)
}

/// A failed trace carries the partial curve up to the failure.
#[derive(Debug)]
pub struct TraceFailure {
    pub error: Error,
    pub partial: LegendrianCurve,
}

/// Trace a trajectory of q from `start` by integrating the unit-speed
/// direction field 2 arg(gamma_1') = -arg(q) (horizontal) or pi - arg(q)
/// (vertical); the vertical component follows the Legendrian constraint.
///
/// The direction field is a line field: at the start `orientation` picks one
/// of the two opposite roots (+1 takes the principal one), and the root is
/// continued along the trace to stay near the running heading. To retrace a
/// curve backwards use [`trace_with_heading`] with the negated end velocity;
/// the principal root at the endpoint need not oppose the arrival heading.
pub fn trace(
    q: &QuadDiff,
    start: HPoint,
    mode: TraceMode,
    orientation: f64,
    step: f64,
    n_steps: usize,
) -> Result<LegendrianCurve, TraceFailure> {
    let v = q.eval(start);
    if v.norm() < BRANCH_FLOOR {
        return Err(TraceFailure {
            error: Error::HitZero { point: start, steps: 0 },
            partial: LegendrianCurve::from_samples(vec![]),
        });
    }
    let offset = match mode {
        TraceMode::Horizontal => 0.0,
        TraceMode::Vertical => std::f64::consts::PI,
    };
    let theta0 = (offset - v.arg()) / 2.0
        + if orientation >= 0.0 { 0.0 } else { std::f64::consts::PI };
    trace_with_heading(q, start, mode, C64::from_polar(1.0, theta0), step, n_steps)
}

/// Like [`trace`], but starts with the direction root nearest to `heading`.
pub fn trace_with_heading(
    q: &QuadDiff,
    start: HPoint,
    mode: TraceMode,
    heading: C64,
    step: f64,
    n_steps: usize,
) -> Result<LegendrianCurve, TraceFailure> {
    let offset = match mode {
        TraceMode::Horizontal => 0.0,
        TraceMode::Vertical => std::f64::consts::PI,
    };
    let target = |p: HPoint| -> Result<f64, Error> {
        let v = q.eval(p);
        if v.norm() < BRANCH_FLOOR {
            return Err(Error::HitZero { point: p, steps: 0 });
        }
        Ok((offset - v.arg()) / 2.0)
    };

    let mut samples = Vec::with_capacity(n_steps + 1);
    let fail = |error: Error, samples: Vec<CurveSample>, steps: usize| TraceFailure {
        error: match error {
            Error::HitZero { point, .. } => Error::HitZero { point, steps },
            Error::LeftDomain { point, .. } => Error::LeftDomain { point, steps },
            e => e,
        },
        partial: LegendrianCurve::from_samples(samples),
    };

    let mut theta = heading.arg();
    let mut p = start;

    // direction at a stage point, root nearest to the running heading
    let dir = |p: HPoint, theta_prev: f64| -> Result<(C64, f64, f64), Error> {
        let base = target(p)?;
        let mut delta = (base - theta_prev) % std::f64::consts::PI;
        if delta < -std::f64::consts::FRAC_PI_2 {
            delta += std::f64::consts::PI;
        } else if delta >= std::f64::consts::FRAC_PI_2 {
            delta -= std::f64::consts::PI;
        }
        let th = theta_prev + delta;
        let vz = C64::from_polar(1.0, th);
        let vt = -2.0 * (p.z.conj() * vz).im;
        Ok((vz, vt, th))
    };

    for i in 0..=n_steps {
        if !q.domain().contains(p) && i > 0 {
            return Err(fail(
                Error::LeftDomain { point: p, steps: i },
                samples,
                i,
            ));
        }
        let (vz, vt, th) = match dir(p, theta) {
            Ok(v) => v,
            Err(e) => return Err(fail(e, samples, i)),
        };
        theta = th;
        samples.push(CurveSample {
            s: i as f64 * step,
            point: p,
            vel_z: vz,
            vel_t: vt,
        });
        if i == n_steps {
            break;
        }
        // RK4 step of (z, t)
        let stage = |dz: C64, dt: f64, frac: f64| HPoint::new(p.z + frac * step * dz, p.t + frac * step * dt);
        let r = (|| -> Result<(C64, f64), Error> {
            let (k1z, k1t, _) = dir(p, theta)?;
            let (k2z, k2t, _) = dir(stage(k1z, k1t, 0.5), theta)?;
            let (k3z, k3t, _) = dir(stage(k2z, k2t, 0.5), theta)?;
            let (k4z, k4t, _) = dir(stage(k3z, k3t, 1.0), theta)?;
            Ok((
                (k1z + 2.0 * (k2z + k3z) + k4z) / 6.0,
                (k1t + 2.0 * (k2t + k3t) + k4t) / 6.0,
            ))
        })();
        match r {
            Ok((dz, dt)) => {
                p = HPoint::new(p.z + step * dz, p.t + step * dt);
            }
            Err(e) => return Err(fail(e, samples, i)),
        }
    }
    Ok(LegendrianCurve::from_samples(samples))
}

/// Length-ratio report for a map acting on a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct DilationReport {
    /// l_{q_dst}(f(c)) / l_{q_src}(c).
    pub length_ratio: f64,
    pub source_class: Classification,
    pub image_class: Classification,
}

/// q-length dilation of `f` on the curve; errors when the image fails to
/// classify as a trajectory of `q_dst`.
pub fn dilation_factor(
    f: &ContactMap,
    q_src: &QuadDiff,
    q_dst: &QuadDiff,
    c: &LegendrianCurve,
    tol: f64,
) -> Result<DilationReport, Error> {
    let image = c.map_through(f);
    let image_class = image.classify(q_dst, tol);
    if image_class == Classification::Neither {
        return Err(Error::ImageNotTrajectory);
    }
    Ok(DilationReport {
        length_ratio: image.q_length(q_dst) / c.q_length(q_src),
        source_class: c.classify(q_src, tol),
        image_class,
    })
}

/// Ratio of horizontal arclengths of f(c) and c; the parameter-stretch
/// factor for unit-speed curves.
pub fn arc_dilation_factor(f: &ContactMap, c: &LegendrianCurve) -> f64 {
    c.map_through(f).horizontal_arclength() / c.horizontal_arclength()
}
