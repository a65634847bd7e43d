//! The phase space `A_R × T^{2n}`: annulus coordinates `(p0, q0)` with `q0`
//! mod 1, torus coordinates `(p_i, q_i)` with `p_i` mod 2 and `q_i` mod 1.
//!
//! Loops are handled in two forms. A raw loop is a cyclic sequence of
//! canonical points sampled at `t = k/K`, the closing sample at `t = 1` being
//! implied. A [`LoopSample`] is its lift: canonical points plus an integer
//! sheet index per modular coordinate, so that re-wrapping is exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Period of every `q` coordinate.
pub const Q_PERIOD: f64 = 1.0;
/// Period of the torus momenta `p_1..p_n`.
pub const P_PERIOD: f64 = 2.0;

/// Geometry of `A_R × T^{2n}` together with the marked level `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct PhaseSpaceConfig {
    radius: f64,
    marked_level: f64,
    torus_dim: usize,
}

#[derive(Serialize, Deserialize)]
struct RawConfig {
    #[serde(rename = "R")]
    radius: f64,
    u: f64,
    n: usize,
}

impl TryFrom<RawConfig> for PhaseSpaceConfig {
    type Error = Error;

    fn try_from(raw: RawConfig) -> Result<Self> {
        PhaseSpaceConfig::new(raw.radius, raw.u, raw.n)
    }
}

impl From<PhaseSpaceConfig> for RawConfig {
    fn from(cfg: PhaseSpaceConfig) -> Self {
        RawConfig {
            radius: cfg.radius,
            u: cfg.marked_level,
            n: cfg.torus_dim,
        }
    }
}

impl PhaseSpaceConfig {
    pub fn new(radius: f64, marked_level: f64, torus_dim: usize) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidGeometry(format!("R must be positive, got {radius}")));
        }
        if !(marked_level.is_finite() && marked_level.abs() < radius) {
            return Err(Error::InvalidGeometry(format!(
                "u must lie in (-R, R) = ({}, {radius}), got {marked_level}",
                -radius
            )));
        }
        if torus_dim == 0 {
            return Err(Error::InvalidGeometry("n must be at least 1".into()));
        }
        Ok(Self {
            radius,
            marked_level,
            torus_dim,
        })
    }

    /// Annulus half-width `R`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Marked level `u`.
    pub fn marked_level(&self) -> f64 {
        self.marked_level
    }

    /// Number `n` of torus factors.
    pub fn torus_dim(&self) -> usize {
        self.torus_dim
    }

    /// `m_u = min{1, R - |u|}`, the radius scale of the bump chart.
    pub fn m_u(&self) -> f64 {
        (self.radius - self.marked_level.abs()).min(1.0)
    }

    /// `R - |u|`, the scale of the two outer charts.
    pub fn outer_width(&self) -> f64 {
        self.radius - self.marked_level.abs()
    }

    /// The momentum centre `ū = (u, 0, ..., 0)` of the marked set.
    pub fn marked_momentum(&self) -> Vec<f64> {
        let mut centre = vec![0.0; self.torus_dim + 1];
        centre[0] = self.marked_level;
        centre
    }

    pub fn contains_p0(&self, p0: f64) -> bool {
        p0.abs() < self.radius
    }
}

/// Canonical representative of `x` modulo `period`, in `[0, period)`.
pub fn wrap(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    // rem_euclid can round up to exactly `period` for tiny negative inputs
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Signed representative of `x` modulo `period`, in `[-period/2, period/2)`.
pub fn signed_wrap(x: f64, period: f64) -> f64 {
    let r = wrap(x, period);
    if r >= 0.5 * period {
        r - period
    } else {
        r
    }
}

/// A point of `A_R × T^{2n}` stored in canonical representatives.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub p0: f64,
    pub q0: f64,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl PhasePoint {
    /// Builds a point, wrapping the modular coordinates. `p` and `q` hold the
    /// torus coordinates `p_1..p_n` and `q_1..q_n`.
    pub fn new(p0: f64, q0: f64, p: Vec<f64>, q: Vec<f64>) -> Self {
        assert_eq!(p.len(), q.len(), "torus momenta and angles must pair up");
        Self {
            p0,
            q0: wrap(q0, Q_PERIOD),
            p: p.into_iter().map(|v| wrap(v, P_PERIOD)).collect(),
            q: q.into_iter().map(|v| wrap(v, Q_PERIOD)).collect(),
        }
    }

    pub fn torus_dim(&self) -> usize {
        self.p.len()
    }

    /// Modular coordinates in winding order `q0, p1, q1, ..., pn, qn`.
    pub fn modular_coords(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(1 + 2 * self.p.len());
        out.push(self.q0);
        for (p, q) in self.p.iter().zip(&self.q) {
            out.push(*p);
            out.push(*q);
        }
        out
    }

    pub fn to_lifted(&self) -> LiftedState {
        let mut p = Vec::with_capacity(self.p.len() + 1);
        p.push(self.p0);
        p.extend_from_slice(&self.p);
        let mut q = Vec::with_capacity(self.q.len() + 1);
        q.push(self.q0);
        q.extend_from_slice(&self.q);
        LiftedState { p, q }
    }
}

/// Period of the `j`-th coordinate in winding order.
fn winding_period(j: usize) -> f64 {
    if j.is_multiple_of(2) {
        Q_PERIOD
    } else {
        P_PERIOD
    }
}

/// A point with all coordinates real-valued (no wrapping). Index 0 of `p`
/// and `q` is the annulus pair `(p0, q0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedState {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl LiftedState {
    pub fn zeros(torus_dim: usize) -> Self {
        Self {
            p: vec![0.0; torus_dim + 1],
            q: vec![0.0; torus_dim + 1],
        }
    }

    pub fn torus_dim(&self) -> usize {
        self.p.len() - 1
    }

    pub fn dim(&self) -> usize {
        2 * self.p.len()
    }

    /// Flat layout `[p0..pn, q0..qn]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.p.clone();
        v.extend_from_slice(&self.q);
        v
    }

    pub fn from_slice(flat: &[f64]) -> Self {
        let half = flat.len() / 2;
        Self {
            p: flat[..half].to_vec(),
            q: flat[half..].to_vec(),
        }
    }

    pub fn to_point(&self) -> PhasePoint {
        PhasePoint::new(
            self.p[0],
            self.q[0],
            self.p[1..].to_vec(),
            self.q[1..].to_vec(),
        )
    }

    /// Lifted coordinates in winding order `q0, p1, q1, ..., pn, qn`.
    fn modular_coords(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.p.len() - 1);
        out.push(self.q[0]);
        for i in 1..self.p.len() {
            out.push(self.p[i]);
            out.push(self.q[i]);
        }
        out
    }
}

/// Free homotopy class `(α_ℓ, 0)`: winding `ℓ` in `q0`, zero torus winding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomotopyClass {
    pub ell: i64,
    #[serde(rename = "torusWinding")]
    torus_winding: Vec<i64>,
}

impl HomotopyClass {
    pub fn new(ell: i64, torus_dim: usize) -> Self {
        Self {
            ell,
            torus_winding: vec![0; 2 * torus_dim],
        }
    }

    pub fn torus_dim(&self) -> usize {
        self.torus_winding.len() / 2
    }

    /// The winding vector every loop in this class has, in winding order.
    pub fn winding(&self) -> Vec<i64> {
        let mut w = Vec::with_capacity(1 + self.torus_winding.len());
        w.push(self.ell);
        w.extend_from_slice(&self.torus_winding);
        w
    }
}

/// Sheet indices of a cyclic sequence of samples, via shortest-step lifting.
/// Returns one row per sample plus the closing row (the lift of sample 0
/// reached after going once around).
fn lift_sheets(raw: &[PhasePoint]) -> Result<Vec<Vec<i64>>> {
    let Some(first) = raw.first() else {
        return Err(Error::Parse("a loop needs at least one sample".into()));
    };
    let n = first.torus_dim();
    if let Some(bad) = raw.iter().find(|x| x.torus_dim() != n) {
        return Err(Error::InvalidGeometry(format!(
            "loop mixes torus dimensions {n} and {}",
            bad.torus_dim()
        )));
    }
    let coords: Vec<Vec<f64>> = raw.iter().map(PhasePoint::modular_coords).collect();
    let width = coords[0].len();
    let k_total = raw.len();

    let mut sheets = Vec::with_capacity(k_total + 1);
    sheets.push(vec![0i64; width]);
    for k in 0..k_total {
        let next = (k + 1) % k_total;
        let mut row = sheets[k].clone();
        for j in 0..width {
            let period = winding_period(j);
            let d = coords[next][j] - coords[k][j];
            let step = d - period * (d / period).round();
            if step.abs() >= 0.5 * period {
                return Err(Error::AmbiguousLift {
                    coordinate: j,
                    index: k,
                    next,
                    jump: step,
                    half_period: 0.5 * period,
                });
            }
            // integer number of sheets crossed by the shortest step
            let crossed = ((coords[k][j] + step - coords[next][j]) / period).round() as i64;
            row[j] += crossed;
        }
        sheets.push(row);
    }
    Ok(sheets)
}

/// Winding numbers of a raw cyclic loop in the order `q0, p1, q1, ..., pn, qn`.
pub fn winding_numbers(raw: &[PhasePoint]) -> Result<Vec<i64>> {
    let sheets = lift_sheets(raw)?;
    Ok(sheets.last().cloned().unwrap_or_default())
}

/// A lifted loop sampled on `[0, 1]`, including the closing sample at `t = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSample {
    times: Vec<f64>,
    points: Vec<PhasePoint>,
    sheets: Vec<Vec<i64>>,
    class: HomotopyClass,
}

/// Lifts a raw loop sampled at `t = k/K` after checking its class.
pub fn lift_loop(raw: &[PhasePoint], class: &HomotopyClass) -> Result<LoopSample> {
    let sheets = lift_sheets(raw)?;
    let found = sheets.last().cloned().unwrap_or_default();
    if found != class.winding() {
        return Err(Error::WrongClass {
            expected: class.winding(),
            found,
        });
    }
    let k_total = raw.len();
    let times = (0..=k_total).map(|k| k as f64 / k_total as f64).collect();
    let mut points = raw.to_vec();
    points.push(raw[0].clone());
    Ok(LoopSample {
        times,
        points,
        sheets,
        class: class.clone(),
    })
}

impl LoopSample {
    /// Builds a loop from real-valued states covering `[0, 1]`. The closing
    /// state is snapped onto the first one shifted by the class winding; the
    /// caller is responsible for the closing defect being small.
    pub fn from_lifted(times: Vec<f64>, states: &[LiftedState], class: &HomotopyClass) -> Result<Self> {
        if states.len() < 2 || states.len() != times.len() {
            return Err(Error::Parse("a lifted loop needs matching times and at least two states".into()));
        }
        let first = states[0].modular_coords();
        let last = states[states.len() - 1].modular_coords();
        let found: Vec<i64> = first
            .iter()
            .zip(&last)
            .enumerate()
            .map(|(j, (a, b))| ((b - a) / winding_period(j)).round() as i64)
            .collect();
        if found != class.winding() {
            return Err(Error::WrongClass {
                expected: class.winding(),
                found,
            });
        }
        let mut points = Vec::with_capacity(states.len());
        let mut sheets = Vec::with_capacity(states.len());
        for state in &states[..states.len() - 1] {
            points.push(state.to_point());
            sheets.push(
                state
                    .modular_coords()
                    .iter()
                    .enumerate()
                    .map(|(j, v)| (v / winding_period(j)).floor() as i64)
                    .collect::<Vec<_>>(),
            );
        }
        points.push(points[0].clone());
        let closing: Vec<i64> = sheets[0].iter().zip(&found).map(|(s, w)| s + w).collect();
        sheets.push(closing);
        Ok(Self {
            times,
            points,
            sheets,
            class: class.clone(),
        })
    }

    pub fn class(&self) -> &HomotopyClass {
        &self.class
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of samples including the closing one.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, k: usize) -> &PhasePoint {
        &self.points[k]
    }

    /// Real-valued coordinates of sample `k`.
    pub fn lifted(&self, k: usize) -> LiftedState {
        let x = &self.points[k];
        let s = &self.sheets[k];
        let mut state = x.to_lifted();
        state.q[0] += s[0] as f64 * Q_PERIOD;
        for i in 1..state.p.len() {
            state.p[i] += s[2 * i - 1] as f64 * P_PERIOD;
            state.q[i] += s[2 * i] as f64 * Q_PERIOD;
        }
        state
    }

    pub fn lifted_states(&self) -> Vec<LiftedState> {
        (0..self.len()).map(|k| self.lifted(k)).collect()
    }

    /// The raw samples this loop was lifted from (closing sample dropped).
    pub fn rewrap(&self) -> Vec<PhasePoint> {
        self.points[..self.points.len() - 1].to_vec()
    }

    /// Winding of the lift, read off the first and closing sheets.
    pub fn winding(&self) -> Vec<i64> {
        let first = &self.sheets[0];
        let last = &self.sheets[self.sheets.len() - 1];
        last.iter().zip(first).map(|(b, a)| b - a).collect()
    }

    /// Serializable records with real-valued coordinates.
    pub fn to_records(&self) -> Vec<LoopRecord> {
        (0..self.len())
            .map(|k| {
                let state = self.lifted(k);
                LoopRecord {
                    t: self.times[k],
                    p0: state.p[0],
                    q0: state.q[0],
                    p: state.p[1..].to_vec(),
                    q: state.q[1..].to_vec(),
                    lifted: Some(true),
                }
            })
            .collect()
    }
}

/// One sample of a serialized loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopRecord {
    pub t: f64,
    pub p0: f64,
    pub q0: f64,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lifted: Option<bool>,
}

/// Serializes a raw loop sampled at `t = k/K`.
pub fn raw_loop_records(raw: &[PhasePoint]) -> Vec<LoopRecord> {
    let k_total = raw.len();
    raw.iter()
        .enumerate()
        .map(|(k, x)| LoopRecord {
            t: k as f64 / k_total as f64,
            p0: x.p0,
            q0: x.q0,
            p: x.p.clone(),
            q: x.q.clone(),
            lifted: None,
        })
        .collect()
}

/// Parses a raw loop from its JSON record array. Lifted records are rejected.
pub fn raw_loop_from_json(text: &str) -> Result<Vec<PhasePoint>> {
    let records: Vec<LoopRecord> = serde_json::from_str(text)?;
    records
        .into_iter()
        .map(|r| {
            if r.lifted == Some(true) {
                return Err(Error::Parse("expected a raw loop, found lifted records".into()));
            }
            if r.p.len() != r.q.len() {
                return Err(Error::Parse("p and q arrays differ in length".into()));
            }
            Ok(PhasePoint::new(r.p0, r.q0, r.p, r.q))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha_loop(ell: i64, samples: usize, n: usize) -> Vec<PhasePoint> {
        (0..samples)
            .map(|k| {
                let t = k as f64 / samples as f64;
                PhasePoint::new(0.0, ell as f64 * t, vec![0.3; n], vec![0.7; n])
            })
            .collect()
    }

    #[test]
    fn geometry_rejects_bad_inputs() {
        assert!(PhaseSpaceConfig::new(0.0, 0.0, 1).is_err());
        assert!(PhaseSpaceConfig::new(1.0, 1.0, 1).is_err());
        assert!(PhaseSpaceConfig::new(1.0, -1.2, 1).is_err());
        assert!(PhaseSpaceConfig::new(1.0, 0.0, 0).is_err());
        let g = PhaseSpaceConfig::new(2.0, 0.5, 3).unwrap();
        assert_eq!(g.m_u(), 1.0);
        assert_eq!(g.marked_momentum(), vec![0.5, 0.0, 0.0, 0.0]);
        let g = PhaseSpaceConfig::new(1.0, -0.6, 1).unwrap();
        assert!((g.m_u() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn geometry_json_uses_short_names() {
        let g = PhaseSpaceConfig::new(1.5, -0.25, 2).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(text, r#"{"R":1.5,"u":-0.25,"n":2}"#);
        let back: PhaseSpaceConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<PhaseSpaceConfig>(r#"{"R":1,"u":3,"n":1}"#).is_err());
    }

    #[test]
    fn canonical_representatives() {
        let x = PhasePoint::new(0.1, -0.25, vec![-0.5, 4.5], vec![1.25, 3.0]);
        assert_eq!(x.q0, 0.75);
        assert_eq!(x.p, vec![1.5, 0.5]);
        assert_eq!(x.q, vec![0.25, 0.0]);
        assert_eq!(wrap(-1e-300, 1.0), 0.0);
    }

    #[test]
    fn constant_loop_has_zero_winding() {
        let raw = vec![PhasePoint::new(0.2, 0.4, vec![1.0], vec![0.5]); 10];
        assert_eq!(winding_numbers(&raw).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn double_winding_in_q0() {
        let raw = alpha_loop(2, 64, 2);
        assert_eq!(winding_numbers(&raw).unwrap(), vec![2, 0, 0, 0, 0]);
    }

    #[test]
    fn torus_momentum_winding() {
        let raw: Vec<_> = (0..64)
            .map(|k| {
                let t = k as f64 / 64.0;
                PhasePoint::new(0.0, t, vec![2.0 * t], vec![0.0])
            })
            .collect();
        assert_eq!(winding_numbers(&raw).unwrap(), vec![1, 1, 0]);
    }

    #[test]
    fn coarse_sampling_is_ambiguous() {
        let raw = alpha_loop(1, 2, 1);
        assert!(matches!(winding_numbers(&raw), Err(Error::AmbiguousLift { .. })));
    }

    #[test]
    fn lift_checks_class() {
        let raw = alpha_loop(1, 128, 1);
        let lift = lift_loop(&raw, &HomotopyClass::new(1, 1)).unwrap();
        let first = lift.lifted(0);
        let last = lift.lifted(lift.len() - 1);
        assert_eq!(last.q[0] - first.q[0], 1.0);
        assert_eq!(last.p[1], first.p[1]);
        assert_eq!(lift.times()[0], 0.0);
        assert_eq!(*lift.times().last().unwrap(), 1.0);
        assert_eq!(lift.rewrap(), raw);

        let err = lift_loop(&raw, &HomotopyClass::new(2, 1)).unwrap_err();
        assert!(matches!(err, Error::WrongClass { .. }));
    }

    #[test]
    fn constant_loop_lift_is_identity() {
        let raw = vec![PhasePoint::new(-0.3, 0.9, vec![1.9], vec![0.1]); 5];
        let lift = lift_loop(&raw, &HomotopyClass::new(0, 1)).unwrap();
        for k in 0..lift.len() {
            assert_eq!(lift.lifted(k), raw[0].to_lifted());
        }
    }

    #[test]
    fn from_lifted_snaps_the_closing_sample() {
        let states: Vec<LiftedState> = (0..=8)
            .map(|k| {
                let t = k as f64 / 8.0;
                LiftedState {
                    p: vec![-0.5, 0.0],
                    q: vec![0.95 + 2.0 * t + if k == 8 { 1e-12 } else { 0.0 }, 0.0],
                }
            })
            .collect();
        let times = (0..=8).map(|k| k as f64 / 8.0).collect();
        let lp = LoopSample::from_lifted(times, &states, &HomotopyClass::new(2, 1)).unwrap();
        assert_eq!(lp.winding(), vec![2, 0, 0]);
        assert_eq!(lp.lifted(8).q[0] - lp.lifted(0).q[0], 2.0);
        assert!((lp.lifted(3).q[0] - states[3].q[0]).abs() < 1e-12);
    }

    #[test]
    fn raw_loop_json_round_trip() {
        let raw = alpha_loop(1, 8, 1);
        let text = serde_json::to_string(&raw_loop_records(&raw)).unwrap();
        assert!(!text.contains("lifted"));
        let back = raw_loop_from_json(&text).unwrap();
        assert_eq!(back, raw);

        let lift = lift_loop(&raw, &HomotopyClass::new(1, 1)).unwrap();
        let lifted_text = serde_json::to_string(&lift.to_records()).unwrap();
        assert!(lifted_text.contains("\"lifted\":true"));
        assert!(raw_loop_from_json(&lifted_text).is_err());
    }
}
