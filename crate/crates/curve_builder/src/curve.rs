//! Sampled G curves, their convex envelopes and curve files.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use entropy_core::{BellDiagonalParams, EntropyQuantity, InputDistribution, MeasurementAngles, QubitStrategy, OMEGA_MAX};
use serde::{Deserialize, Serialize};

use crate::interp::Interpolant;
use crate::minimize::{minimize_with_starts, polish, warm_point};
use crate::{CurveError, CurvePoint, OptimizerConfig, RestartStats, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    G,
    F,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tangent {
    pub omega_star: f64,
    pub slope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub quantity: EntropyQuantity,
    pub pxy: InputDistribution,
    pub kind: CurveKind,
    pub points: Vec<CurvePoint>,
    pub tangent: Option<Tangent>,
}

/// Negative excursions of `h` shallower than this are treated as noise.
const ROOT_SIGNIFICANCE: f64 = 1e-6;
/// Bisection width for ω*.
const ROOT_TOL: f64 = 1e-9;

impl RateCurve {
    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(CurveError::Domain("curve has no points".into()));
        }
        if self.points.iter().any(|p| !p.omega.is_finite() || !p.entropy.is_finite()) {
            return Err(CurveError::Domain("non-finite curve point".into()));
        }
        if self.points.windows(2).any(|w| !(w[1].omega > w[0].omega)) {
            return Err(CurveError::Domain("curve points must be strictly increasing in omega".into()));
        }
        Ok(())
    }

    /// Monotone cubic through the points, anchored at `(3/4, 0)` when the
    /// first point lies above 3/4.
    pub fn interpolant(&self) -> Result<Interpolant> {
        self.validate()?;
        let mut xs = Vec::with_capacity(self.points.len() + 1);
        let mut ys = Vec::with_capacity(self.points.len() + 1);
        if self.points[0].omega > 0.75 {
            xs.push(0.75);
            ys.push(0.0);
        }
        xs.extend(self.points.iter().map(|p| p.omega));
        ys.extend(self.points.iter().map(|p| p.entropy));
        Interpolant::new(&xs, &ys)
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.omega).collect()
    }

    /// Smallest slope increment between consecutive chords, including the
    /// anchor at 3/4. Nonnegative for a convex curve.
    pub fn min_second_difference(&self) -> f64 {
        let mut xs = vec![0.75];
        let mut ys = vec![0.0];
        for p in &self.points {
            if p.omega > xs[xs.len() - 1] {
                xs.push(p.omega);
                ys.push(p.entropy);
            }
        }
        let slopes: Vec<f64> = (1..xs.len()).map(|i| (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])).collect();
        slopes.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }
}

/// Default score grid: 60 points, with 5e−4 spacing just above 3/4 and over
/// the region where the tangent points of all six curves fall.
pub fn default_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (1..=5).map(|k| 0.75 + 5e-4 * k as f64).collect();
    g.extend((0..17).map(|k| 0.755 + 0.005 * k as f64));
    g.extend((1..=37).map(|k| 0.8355 + 5e-4 * (k - 1) as f64));
    g.push(OMEGA_MAX);
    g
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 8 {
        return Err(CurveError::Domain(format!("grid needs at least 8 points, got {}", grid.len())));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CurveError::Domain("grid must be strictly increasing".into()));
    }
    if !(grid[0] > 0.75) || grid[grid.len() - 1] > OMEGA_MAX + 1e-12 {
        return Err(CurveError::Domain(format!("grid must lie in (3/4, {OMEGA_MAX}]")));
    }
    Ok(())
}

/// Minimizes at every grid point. Each point also starts from its left
/// neighbour's argmin; afterwards a backward and a forward sweep re-polish
/// each point from its neighbours' argmins.
pub fn build_g_curve_with_stats(
    quantity: EntropyQuantity,
    grid: &[f64],
    pxy: &InputDistribution,
    config: &OptimizerConfig,
) -> Result<(RateCurve, Vec<RestartStats>)> {
    check_grid(grid)?;
    config.validate()?;
    let mut points: Vec<CurvePoint> = Vec::with_capacity(grid.len());
    let mut stats = Vec::with_capacity(grid.len());
    for &omega in grid {
        let warm: Vec<_> = points.last().and_then(warm_point).into_iter().collect();
        let (p, s) = minimize_with_starts(quantity, omega, pxy, config, &warm)?;
        points.push(p);
        stats.push(s);
    }
    let n = points.len();
    let order: Vec<usize> = (0..n).rev().chain(0..n).collect();
    for i in order {
        let warm: Vec<_> = [i.checked_sub(1), (i + 1 < n).then_some(i + 1)]
            .into_iter()
            .flatten()
            .filter_map(|j| warm_point(&points[j]))
            .collect();
        if let Ok(p) = polish(quantity, points[i].omega, pxy, config, &warm) {
            if p.entropy < points[i].entropy {
                points[i] = p;
            }
        }
    }
    let curve = RateCurve { quantity, pxy: *pxy, kind: CurveKind::G, points, tangent: None };
    Ok((curve, stats))
}

pub fn build_g_curve(
    quantity: EntropyQuantity,
    grid: &[f64],
    pxy: &InputDistribution,
    config: &OptimizerConfig,
) -> Result<RateCurve> {
    build_g_curve_with_stats(quantity, grid, pxy, config).map(|(c, _)| c)
}

/// Result of the envelope construction with diagnostics.
#[derive(Clone, Debug)]
pub struct Envelope {
    pub curve: RateCurve,
    /// Every root of `h(ω) = G′(ω)(ω − 3/4) − G(ω)` found, ascending.
    pub roots: Vec<f64>,
    pub warning: Option<String>,
}

/// Indices of the lower convex hull of `(xs, ys)`, which must be sorted.
fn lower_hull(xs: &[f64], ys: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..xs.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

pub fn convex_envelope_report(curve: &RateCurve) -> Result<Envelope> {
    if curve.kind != CurveKind::G {
        return Err(CurveError::Domain("convex_envelope expects a G curve".into()));
    }
    let g = curve.interpolant()?;
    let h = |w: f64| g.derivative(w) * (w - 0.75) - g.eval(w);

    // Scan each knot interval for transitions from a significantly negative
    // h to a nonnegative one.
    let knots = g.knots();
    let mut samples = Vec::new();
    for w in knots.windows(2) {
        for k in 0..16 {
            samples.push(w[0] + (w[1] - w[0]) * k as f64 / 16.0);
        }
    }
    samples.push(knots[knots.len() - 1]);
    let samples: Vec<f64> = samples.into_iter().filter(|&w| w > 0.75).collect();
    let mut roots = Vec::new();
    let mut run_min = 0.0f64;
    for pair in samples.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (ha, hb) = (h(a), h(b));
        run_min = run_min.min(ha);
        if ha < 0.0 && hb >= 0.0 {
            if run_min < -ROOT_SIGNIFICANCE {
                let (mut lo, mut hi) = (a, b);
                while hi - lo > ROOT_TOL {
                    let mid = 0.5 * (lo + hi);
                    if h(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            run_min = 0.0;
        }
    }
    let mut warnings = Vec::new();
    if roots.len() > 1 {
        warnings.push(format!("{}: h has {} roots {:?}; using the largest", curve.quantity, roots.len(), roots));
    }

    // F is the lower convex hull of (3/4, 0), the G points and the tangent
    // point itself.
    let mut points: Vec<CurvePoint> = curve.points.clone();
    if let Some(&w_star) = roots.last() {
        if points.iter().all(|p| (p.omega - w_star).abs() > 1e-12) {
            let at = points.partition_point(|p| p.omega < w_star);
            points.insert(at, CurvePoint { omega: w_star, entropy: g.eval(w_star), argmin: None });
        }
    }
    let mut xs = vec![0.75];
    let mut ys = vec![0.0];
    xs.extend(points.iter().map(|p| p.omega));
    ys.extend(points.iter().map(|p| p.entropy));
    let hull = lower_hull(&xs, &ys);
    for seg in hull.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        for i in a + 1..b {
            let value = ys[a] + (ys[b] - ys[a]) * (xs[i] - xs[a]) / (xs[b] - xs[a]);
            let p = &mut points[i - 1];
            if value < p.entropy {
                p.entropy = value;
                p.argmin = None;
            }
        }
    }
    let tangent = match (roots.last(), hull.get(1)) {
        (Some(&w_star), Some(&v)) => {
            if (xs[v] - w_star).abs() > 1e-6 {
                warnings.push(format!("{}: hull tangent at {} differs from the root {w_star}", curve.quantity, xs[v]));
            }
            Some(Tangent { omega_star: xs[v], slope: ys[v] / (xs[v] - 0.75) })
        }
        _ => None,
    };
    let warning = (!warnings.is_empty()).then(|| warnings.join("; "));

    let out = RateCurve { quantity: curve.quantity, pxy: curve.pxy, kind: CurveKind::F, points, tangent };
    Ok(Envelope { curve: out, roots, warning })
}

pub fn convex_envelope(curve: &RateCurve) -> Result<RateCurve> {
    convex_envelope_report(curve).map(|e| e.curve)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Ok(Format::Csv),
            Some(e) if e.eq_ignore_ascii_case("json") => Ok(Format::Json),
            _ => Err(CurveError::Io(format!("cannot infer curve format from {}", path.display()))),
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveKind::G => "G",
            CurveKind::F => "F",
        })
    }
}

impl FromStr for CurveKind {
    type Err = CurveError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "G" | "g" => Ok(CurveKind::G),
            "F" | "f" => Ok(CurveKind::F),
            other => Err(CurveError::Io(format!("unknown curve kind {other:?}"))),
        }
    }
}

const HEADER: [&str; 9] = ["omega", "entropy", "R", "theta", "delta", "alpha0", "alpha1", "beta0", "beta1"];

/// 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(e: impl fmt::Display) -> CurveError {
    CurveError::Io(e.to_string())
}

pub fn export_curve(curve: &RateCurve, format: Format) -> Result<Vec<u8>> {
    curve.validate()?;
    match format {
        Format::Json => serde_json::to_vec_pretty(curve).map_err(io_err),
        Format::Csv => {
            let mut out = String::new();
            out += &format!("# quantity={}\n# kind={}\n", curve.quantity.tag(), curve.kind);
            let p = curve.pxy.p;
            out += &format!("# pxy={},{},{},{}\n", num(p[0][0]), num(p[0][1]), num(p[1][0]), num(p[1][1]));
            if let Some(t) = curve.tangent {
                out += &format!("# tangent={},{}\n", num(t.omega_star), num(t.slope));
            }
            let mut w = csv::Writer::from_writer(out.into_bytes());
            w.write_record(HEADER).map_err(io_err)?;
            for pt in &curve.points {
                let mut row = vec![num(pt.omega), num(pt.entropy)];
                match &pt.argmin {
                    Some(s) => {
                        row.extend([s.state.r, s.state.theta, s.state.delta].map(num));
                        row.extend(s.angles.as_array().map(num));
                    }
                    None => row.extend(std::iter::repeat(String::new()).take(7)),
                }
                w.write_record(&row).map_err(io_err)?;
            }
            w.into_inner().map_err(io_err)
        }
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|e| CurveError::Io(format!("bad number {s:?}: {e}")))
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_f64).collect()
}

pub fn import_curve(bytes: &[u8], format: Format) -> Result<RateCurve> {
    let curve = match format {
        Format::Json => serde_json::from_slice::<RateCurve>(bytes).map_err(io_err)?,
        Format::Csv => {
            let text = std::str::from_utf8(bytes).map_err(io_err)?;
            let (mut quantity, mut kind, mut pxy, mut tangent) = (None, None, None, None);
            for line in text.lines().filter_map(|l| l.strip_prefix('#')) {
                let Some((key, value)) = line.trim().split_once('=') else { continue };
                match key.trim() {
                    "quantity" => quantity = Some(value.parse::<EntropyQuantity>().map_err(io_err)?),
                    "kind" => kind = Some(value.parse::<CurveKind>()?),
                    "pxy" => {
                        let v = parse_list(value)?;
                        if v.len() != 4 {
                            return Err(CurveError::Io("pxy needs four entries".into()));
                        }
                        pxy = Some(InputDistribution::new([[v[0], v[1]], [v[2], v[3]]])?);
                    }
                    "tangent" => {
                        let v = parse_list(value)?;
                        if v.len() != 2 {
                            return Err(CurveError::Io("tangent needs two entries".into()));
                        }
                        tangent = Some(Tangent { omega_star: v[0], slope: v[1] });
                    }
                    _ => {}
                }
            }
            let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).flexible(true).from_reader(bytes);
            let mut points = Vec::new();
            for rec in reader.records() {
                let rec = rec.map_err(io_err)?;
                if rec.len() < 2 {
                    return Err(CurveError::Io(format!("short row {rec:?}")));
                }
                let omega = parse_f64(&rec[0])?;
                let entropy = parse_f64(&rec[1])?;
                let argmin = if rec.len() >= 9 && !rec[2].trim().is_empty() {
                    let v: Vec<f64> = (2..9).map(|i| parse_f64(&rec[i])).collect::<Result<_>>()?;
                    let state = BellDiagonalParams { r: v[0], theta: v[1], delta: v[2] };
                    let angles = MeasurementAngles { alpha0: v[3], alpha1: v[4], beta0: v[5], beta1: v[6] };
                    Some(QubitStrategy::new(state, angles)?)
                } else {
                    None
                };
                points.push(CurvePoint { omega, entropy, argmin });
            }
            RateCurve {
                quantity: quantity.ok_or_else(|| CurveError::Io("missing quantity header".into()))?,
                pxy: pxy.unwrap_or_default(),
                kind: kind.unwrap_or(CurveKind::G),
                points,
                tangent,
            }
        }
    };
    curve.validate()?;
    Ok(curve)
}

pub fn write_curve(curve: &RateCurve, path: &Path) -> Result<()> {
    let bytes = export_curve(curve, Format::from_path(path)?)?;
    std::fs::write(path, bytes).map_err(|e| CurveError::Io(format!("{}: {e}", path.display())))
}

pub fn read_curve(path: &Path) -> Result<RateCurve> {
    let bytes = std::fs::read(path).map_err(|e| CurveError::Io(format!("{}: {e}", path.display())))?;
    import_curve(&bytes, Format::from_path(path)?)
}
