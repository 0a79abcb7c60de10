use serde::{Deserialize, Serialize};

use super::cutoff::CutoffFamily;
use crate::dynamics::Trajectory;
use crate::error::{invalid, Error, Result};
use crate::grid::{Field, GridSpec, Point};

/// `G(x,t) = (T-t+h)^{-n/2} e^{-|x-x_j|²/(4(T-t+h))}`, a backward caloric
/// function on `[0, T]`.
pub fn gaussian_weight(spec: &GridSpec, center: &Point, h: f64, t: f64, t_final: f64) -> Result<Field> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(invalid(format!("weight offset h = {h} must be positive")));
    }
    if !(t <= t_final) {
        return Err(invalid(format!("weight time t = {t} exceeds T = {t_final}")));
    }
    let tau = t_final - t + h;
    let peak = tau.powf(-(spec.dim() as f64) / 2.0);
    let values = (0..spec.len())
        .map(|i| peak * (-spec.periodic_dist_sq(&spec.point(i), center) / (4.0 * tau)).exp())
        .collect();
    Field::new(*spec, values)
}

/// Weighted Dirichlet energy and weighted mass of `η·φ`.
pub(crate) fn weighted_parts(phi: &Field, cutoff: &CutoffFamily, weight: &Field) -> Result<(f64, f64)> {
    phi.spec().check_same(cutoff.values.spec())?;
    phi.spec().check_same(weight.spec())?;
    let eta = cutoff.values.values();
    let grad_phi = phi.gradient();
    let g = weight.values();
    let v = phi.values();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..v.len() {
        if eta[i] == 0.0 {
            continue;
        }
        let local = eta[i] * v[i];
        den += local * local * g[i];
        let mut grad_sq = 0.0;
        for (ge, gp) in cutoff.gradient.iter().zip(&grad_phi) {
            let c = v[i] * ge.values()[i] + eta[i] * gp.values()[i];
            grad_sq += c * c;
        }
        num += grad_sq * g[i];
    }
    let w = phi.spec().cell_volume();
    Ok((num * w, den * w))
}

/// `(N, numerator, denominator)` of the frequency function for `φ` at its
/// time tag.
pub fn frequency_components(phi: &Field, cutoff: &CutoffFamily, h: f64, t_final: f64) -> Result<(f64, f64, f64)> {
    let t = phi.time().ok_or_else(|| invalid("frequency needs a time-tagged field"))?;
    let weight = gaussian_weight(phi.spec(), &cutoff.center, h, t, t_final)?;
    let (num, den) = weighted_parts(phi, cutoff, &weight)?;
    if !(den > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    Ok((num / den, num, den))
}

/// `N_{h,j}(t)`: weighted Dirichlet energy over weighted mass of `η_j φ`.
pub fn frequency(phi: &Field, cutoff: &CutoffFamily, h: f64, t_final: f64) -> Result<f64> {
    frequency_components(phi, cutoff, h, t_final).map(|c| c.0)
}

/// Samples of the frequency function along a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTrace {
    pub j: usize,
    pub h: f64,
    pub t_final: f64,
    pub times: Vec<f64>,
    pub n: Vec<f64>,
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

impl FrequencyTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV with columns `t,N,num,den,j,h,T`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(["t", "N", "num", "den", "j", "h", "T"]).map_err(io)?;
        for k in 0..self.len() {
            w.write_record([
                format!("{:?}", self.times[k]),
                format!("{:?}", self.n[k]),
                format!("{:?}", self.num[k]),
                format!("{:?}", self.den[k]),
                self.j.to_string(),
                format!("{:?}", self.h),
                format!("{:?}", self.t_final),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Frequency values at every snapshot in `[lo, T]`; samples whose weighted
/// mass vanishes are left out.
pub fn frequency_trace(
    phi: &Trajectory,
    cutoff: &CutoffFamily,
    j: usize,
    h: f64,
    window: (f64, f64),
) -> Result<FrequencyTrace> {
    let (lo, t_final) = window;
    let eps = 1e-9 * phi.sample_dt();
    if !(lo < t_final) || t_final > phi.final_time() + eps {
        return Err(Error::EmptyWindow { lo, hi: t_final });
    }
    let idx: Vec<usize> = (0..phi.len())
        .filter(|&k| phi.times()[k] >= lo - eps && phi.times()[k] <= t_final + eps)
        .collect();
    if idx.is_empty() {
        return Err(Error::EmptyWindow { lo, hi: t_final });
    }
    let mut trace = FrequencyTrace { j, h, t_final, times: vec![], n: vec![], num: vec![], den: vec![] };
    for k in idx {
        let mut field = phi.fields()[k].clone();
        let t = phi.times()[k].min(t_final);
        field.set_time(Some(t));
        match frequency_components(&field, cutoff, h, t_final) {
            Ok((n, num, den)) => {
                trace.times.push(t);
                trace.n.push(n);
                trace.num.push(num);
                trace.den.push(den);
            }
            Err(Error::ZeroDenominator) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(trace)
}
