use serde::Serialize;

use super::spectrum::spectrum;
use super::{AtomicParams, Chain, DressingCase};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sweep::Axis;

/// A resonance window in `δ1` together with the companion deviations fixed by
/// energy conservation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherentChannel<T> {
    /// 1-based channel number (`C1`, `C2`, ...).
    pub index: usize,
    pub delta1: T,
    pub delta2: T,
    pub delta2p: T,
    pub delta3: T,
}

impl<T: Real> CoherentChannel<T> {
    pub fn new(index: usize, delta1: T) -> Self {
        let (d1, d2, d3) = deviation_tuple(delta1);
        Self {
            index,
            delta1: d1,
            delta2: d2,
            delta2p: -delta1,
            delta3: d3,
        }
    }

    pub fn label(&self) -> String {
        format!("C{}", self.index)
    }

    /// `δ1 + δ2 + δ2' + δ3`.
    pub fn energy_sum(&self) -> T {
        self.delta1 + self.delta2 + self.delta2p + self.delta3
    }
}

/// `(δ1, δ2, δ3) = (δ1, −δ1, δ1)`.
pub fn deviation_tuple<T: Real>(delta1: T) -> (T, T, T) {
    (delta1, -delta1, delta1)
}

/// Information capacity `n³` of `n` coherent channels.
pub fn channel_capacity(n_channels: u32) -> Result<u64> {
    if n_channels == 0 {
        return Err(Error::Domain("capacity needs at least one channel".into()));
    }
    Ok(u64::from(n_channels).pow(3))
}

fn split_pair<T: Real>(center: T, discriminant: T) -> Result<(T, T)> {
    if discriminant < T::zero() {
        return Err(Error::NoRealResonance {
            discriminant: discriminant.to_f64_lossy(),
        });
    }
    let root = discriminant.sqrt();
    let half = T::lit(0.5);
    Ok(((center + root) * half, (center - root) * half))
}

/// Closed-form resonance positions, numbered in the order they are usually
/// quoted and returned sorted by `δ1`.
///
/// Coinciding positions (e.g. every detuning zero) are reported once.
pub fn analytic_resonances<T: Real>(case: DressingCase, p: &AtomicParams<T>) -> Result<Vec<CoherentChannel<T>>> {
    let g = &p.gamma;
    let four = T::lit(4.0);
    let positions: Vec<T> = match case {
        DressingCase::Undressed(Chain::A) => vec![T::zero(), p.delta1],
        DressingCase::Undressed(Chain::B) | DressingCase::Undressed(Chain::C) => {
            vec![-p.delta1p, T::zero()]
        }
        DressingCase::Undressed(Chain::D) => vec![T::zero(), p.delta3],
        DressingCase::Rho2ByE1 => {
            let disc = p.delta1 * p.delta1 + four * g.g21 * g.g23 + four * p.omega1 * p.omega1;
            let (hi, lo) = split_pair(p.delta1, disc)?;
            vec![-p.delta1p, hi, lo]
        }
        DressingCase::Rho1ByE1 => vec![T::zero(), -p.delta1p],
        DressingCase::Rho3ByE1 => {
            let two = T::lit(2.0);
            let center = p.delta1 - two * p.delta1p;
            let disc = center * center
                - four
                    * (p.delta1p * p.delta1p - p.delta1 * p.delta1p - p.omega1 * p.omega1 - g.g31 * g.g33);
            let (hi, lo) = split_pair(center, disc)?;
            vec![T::zero(), hi, lo]
        }
        DressingCase::Rho2ByE3 => {
            let disc = p.delta3 * p.delta3 + four * g.g21 * g.g23 + four * p.omega3 * p.omega3;
            let (hi, lo) = split_pair(p.delta3, disc)?;
            vec![hi, lo, -p.delta1p]
        }
    };

    let mut channels: Vec<CoherentChannel<T>> = Vec::with_capacity(positions.len());
    for (k, d) in positions.into_iter().enumerate() {
        let duplicate = channels
            .iter()
            .any(|ch| (ch.delta1 - d).abs() <= T::default_epsilon() * T::lit(16.0) * T::one().max(d.abs()));
        if !duplicate {
            channels.push(CoherentChannel::new(k + 1, d));
        }
    }
    channels.sort_by(|a, b| a.delta1.partial_cmp(&b.delta1).expect("finite positions"));
    Ok(channels)
}

/// A local maximum of `|ρ(δ1)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak<T> {
    pub delta1: T,
    pub height: T,
}

/// Local maxima of `|ρ(δ1)|` on a uniform grid with three-point parabolic
/// refinement.
///
/// A grid point is a maximum when its left neighbour is strictly lower and the
/// first differing point to its right is strictly lower; on a plateau the
/// leftmost point is reported without refinement. Endpoints never qualify.
pub fn find_peaks<T: Real>(case: DressingCase, p: &AtomicParams<T>, grid: &Axis<T>) -> Result<Vec<Peak<T>>> {
    p.validate()?;
    grid.validate()?;
    let limit = p.gamma.min();
    if grid.step > limit {
        return Err(Error::GridTooCoarse {
            step: grid.step.to_f64_lossy(),
            limit: limit.to_f64_lossy(),
        });
    }
    let points = spectrum(case, p, grid)?;
    let y: Vec<T> = points.iter().map(|s| s.abs).collect();
    let x: Vec<T> = points.iter().map(|s| s.delta1).collect();
    let mut peaks = Vec::new();
    let mut k = 1;
    while k + 1 < y.len() {
        if y[k] > y[k - 1] {
            let mut m = k;
            while m + 1 < y.len() && y[m + 1] == y[k] {
                m += 1;
            }
            if m + 1 < y.len() && y[m + 1] < y[k] {
                peaks.push(if m == k {
                    refine(x[k], grid.step, y[k - 1], y[k], y[k + 1])
                } else {
                    Peak { delta1: x[k], height: y[k] }
                });
            }
            k = m + 1;
        } else {
            k += 1;
        }
    }
    Ok(peaks)
}

fn refine<T: Real>(x: T, step: T, left: T, mid: T, right: T) -> Peak<T> {
    let half = T::lit(0.5);
    let curvature = left - T::lit(2.0) * mid + right;
    if !(curvature < T::zero()) {
        return Peak { delta1: x, height: mid };
    }
    let offset = half * (left - right) / curvature;
    Peak {
        delta1: x + offset * step,
        height: mid - T::lit(0.25) * (left - right) * offset,
    }
}

/// Pairing of an analytic channel with its nearest numeric peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelMatch<T> {
    pub channel: CoherentChannel<T>,
    pub peak: Option<Peak<T>>,
    pub difference: Option<T>,
}

/// Nearest-peak assignment for each analytic channel.
pub fn match_channels<T: Real>(channels: &[CoherentChannel<T>], peaks: &[Peak<T>]) -> Vec<ChannelMatch<T>> {
    channels
        .iter()
        .map(|ch| {
            let nearest = peaks
                .iter()
                .min_by(|a, b| {
                    let da = (a.delta1 - ch.delta1).abs();
                    let db = (b.delta1 - ch.delta1).abs();
                    da.partial_cmp(&db).expect("finite")
                })
                .copied();
            ChannelMatch {
                channel: *ch,
                peak: nearest,
                difference: nearest.map(|pk| (pk.delta1 - ch.delta1).abs()),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Axis<f64> {
        Axis::new(-45.0, 45.0, 0.01).unwrap()
    }

    #[test]
    fn deviation_relations() {
        assert_eq!(deviation_tuple(0.0f64), (0.0, -0.0, 0.0));
        assert_eq!(deviation_tuple(5.0f64), (5.0, -5.0, 5.0));
        for &d in &[-20.0f64, 1e-300, 3.7, 18.47] {
            assert_eq!(CoherentChannel::new(1, d).energy_sum(), 0.0);
        }
    }

    #[test]
    fn capacity_is_cubic() {
        assert_eq!(channel_capacity(1).unwrap(), 1);
        assert_eq!(channel_capacity(2).unwrap(), 8);
        assert_eq!(channel_capacity(3).unwrap(), 27);
        assert!(channel_capacity(0).is_err());
    }

    #[test]
    fn table_positions_for_rho2_dressing() {
        let mut p = AtomicParams::<f64>::defaults();
        p.omega1 = 10.0;
        let ch = analytic_resonances(DressingCase::Rho2ByE1, &p).unwrap();
        assert_eq!(ch.len(), 3);
        let root = (169.0f64 + 4.0 + 400.0).sqrt();
        assert_eq!(ch[0].delta1, -20.0);
        assert_eq!(ch[0].index, 1);
        assert!((ch[1].delta1 - (13.0 - root) / 2.0).abs() < 1e-12);
        assert!((ch[1].delta1 + 5.47).abs() < 0.01);
        assert_eq!(ch[1].index, 3);
        assert!((ch[2].delta1 - 18.47).abs() < 0.01);
        assert_eq!(ch[0].delta2, 20.0);
        assert_eq!(ch[0].delta2p, 20.0);
        assert_eq!(ch[0].delta3, -20.0);
    }

    #[test]
    fn rho1_dressing_positions() {
        let p = AtomicParams::<f64>::defaults();
        let ch = analytic_resonances(DressingCase::Rho1ByE1, &p).unwrap();
        let d: Vec<f64> = ch.iter().map(|c| c.delta1).collect();
        assert_eq!(d, vec![-20.0, 0.0]);
    }

    #[test]
    fn rho3_dressing_discriminant_simplifies() {
        let p = AtomicParams::<f64>::defaults();
        let ch = analytic_resonances(DressingCase::Rho3ByE1, &p).unwrap();
        let root = (169.0f64 + 4.0 * 25.0 + 4.0).sqrt();
        let mut expected = vec![0.0, (13.0 - 40.0 + root) / 2.0, (13.0 - 40.0 - root) / 2.0];
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (c, e) in ch.iter().zip(expected) {
            assert!((c.delta1 - e).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_discriminant_is_an_error() {
        assert!(matches!(split_pair(1.0f64, -0.5), Err(Error::NoRealResonance { .. })));
    }

    #[test]
    fn coinciding_positions_collapse() {
        let mut p = AtomicParams::<f64>::defaults();
        p.delta1 = 0.0;
        p.delta1p = 0.0;
        assert_eq!(analytic_resonances(DressingCase::Undressed(Chain::B), &p).unwrap().len(), 1);
    }

    #[test]
    fn undressed_peaks() {
        let p = AtomicParams::<f64>::defaults();
        let peaks = find_peaks(DressingCase::Undressed(Chain::B), &p, &grid()).unwrap();
        assert_eq!(peaks.len(), 2);
        assert!((peaks[0].delta1 + 20.0).abs() < 2.0);
        assert!(peaks[1].delta1.abs() < 2.0);
    }

    #[test]
    fn rho2_dressing_three_peaks_near_table_positions() {
        let mut p = AtomicParams::<f64>::defaults();
        p.omega1 = 10.0;
        let peaks = find_peaks(DressingCase::Rho2ByE1, &p, &grid()).unwrap();
        let ch = analytic_resonances(DressingCase::Rho2ByE1, &p).unwrap();
        assert_eq!(peaks.len(), 3);
        for m in match_channels(&ch, &peaks) {
            assert!(m.difference.unwrap() < 2.0 * p.gamma.g21);
        }
    }

    #[test]
    fn rho1_dressing_does_not_split() {
        let mut p = AtomicParams::<f64>::defaults();
        for omega in [0.0f64, 5.0, 20.0] {
            p.omega1 = omega.max(1e-6);
            let peaks = find_peaks(DressingCase::Rho1ByE1, &p, &grid()).unwrap();
            assert_eq!(peaks.len(), 2, "Ω1 = {omega}");
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        let p = AtomicParams::<f64>::defaults();
        let coarse = Axis::new(-40.0, 40.0, 1.5).unwrap();
        assert!(matches!(
            find_peaks(DressingCase::Rho2ByE1, &p, &coarse),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn plateau_reports_leftmost_point() {
        // Exercise the plateau branch through the refinement helper contract.
        let pk = refine(1.0f64, 0.1, 2.0, 2.0, 2.0);
        assert_eq!(pk.delta1, 1.0);
        let pk = refine(0.0f64, 1.0, 1.0, 2.0, 1.0);
        assert_eq!(pk.delta1, 0.0);
        assert_eq!(pk.height, 2.0);
        let pk = refine(0.0f64, 1.0, 0.0, 3.0, 2.0);
        // parabola through (-1,0), (0,3), (1,2): vertex at x = 1/4.
        assert!((pk.delta1 - 0.25).abs() < 1e-15);
    }
}
