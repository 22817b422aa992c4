//! Seeded sampling of chart points and of groupoid arrows.

use pnkit_core::geometry::{chart_stretch, ChartId, ChartPoint, OrbitSpec};
use pnkit_core::groupoid::{cocycle_from_values, GroupoidElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Standard deviation of sampled chart coordinates.
pub const SAMPLE_SCALE: f64 = 0.7;
/// Samples with a larger chart stretch are rejected.
pub const MAX_SAMPLE_STRETCH: f64 = 100.0;

/// Independent random streams derived from one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Calibration = 1,
    Evaluation = 2,
    Holdout = 3,
    Groupoid = 4,
    Controls = 5,
    Generators = 6,
    Pairs = 7,
}

pub fn rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream as u64);
    r
}

/// Gaussian chart coordinates, rejection-filtered by chart stretch.
pub fn sample_points(spec: &OrbitSpec, chart: &ChartId, count: usize, rng: &mut ChaCha8Rng) -> Vec<ChartPoint> {
    let normal = Normal::new(0.0, SAMPLE_SCALE).expect("valid normal");
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let coords: Vec<f64> = (0..spec.dim()).map(|_| normal.sample(rng)).collect();
        let p = ChartPoint::new(spec, coords, chart.clone()).expect("finite coordinates");
        if matches!(chart_stretch(spec, &p), Ok(s) if s < MAX_SAMPLE_STRETCH) {
            out.push(p);
        }
    }
    out
}

/// Layout of a point of `Δ_m` relative to the fixed value `c = −t`:
/// `below` entries in `[0, c)`, `pinned` entries equal to `c`, the rest above.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SideLayout {
    pub below: usize,
    pub pinned: usize,
    pub above: usize,
}

/// Random layout for `Δ_m` and `t`; collisions at `−t` are forced whenever
/// `−t ∈ [0, 2]`.
pub fn random_layout(rng: &mut ChaCha8Rng, m: usize, t: f64) -> SideLayout {
    let c = -t;
    if !(0.0..=2.0).contains(&c) {
        return if c < 0.0 {
            SideLayout {
                below: 0,
                pinned: 0,
                above: m,
            }
        } else {
            SideLayout {
                below: m,
                pinned: 0,
                above: 0,
            }
        };
    }
    let pinned = rng.random_range(1..=m);
    let rest = m - pinned;
    let below = if c == 0.0 {
        0
    } else if c == 2.0 {
        rest
    } else {
        rng.random_range(0..=rest)
    };
    SideLayout {
        below,
        pinned,
        above: rest - below,
    }
}

/// A point of `Δ_m` with the given layout around `c = −t`.
pub fn random_simplex_point(rng: &mut ChaCha8Rng, layout: SideLayout, t: f64) -> Vec<f64> {
    let c = -t;
    let (lo_hi, hi_lo) = (c.clamp(0.0, 2.0), c.clamp(0.0, 2.0));
    let mut below: Vec<f64> = (0..layout.below).map(|_| rng.random_range(0.0..1.0) * lo_hi).collect();
    let mut above: Vec<f64> = (0..layout.above)
        .map(|_| 2.0 - rng.random_range(0.0..1.0) * (2.0 - hi_lo))
        .collect();
    below.sort_by(f64::total_cmp);
    above.sort_by(f64::total_cmp);
    let mut out = below;
    out.extend(std::iter::repeat_n(c, layout.pinned));
    out.extend(above);
    out
}

/// Arrow from `a` to `b` (same layout). Pinned slots get the value `pinned_h`
/// (a common value keeps the arrow inside the interior-case subgroupoid).
pub fn arrow_between(a: &[f64], b: &[f64], t: f64, pinned_h: &[f64]) -> GroupoidElement {
    let h = a
        .iter()
        .zip(b)
        .zip(pinned_h)
        .map(|((x, y), p)| {
            if x + t == 0.0 {
                *p
            } else {
                cocycle_from_values(*x, *y, t).expect("same side of −t")
            }
        })
        .collect();
    GroupoidElement {
        lambda: a.to_vec(),
        h,
        t,
    }
}

/// Composable chain of `len` arrows through random points of one layout.
/// With `member = true` pinned slots follow the subgroupoid rules; otherwise
/// they get independent random values.
pub fn random_chain(rng: &mut ChaCha8Rng, m: usize, t: f64, len: usize, member: bool) -> Vec<GroupoidElement> {
    let layout = random_layout(rng, m, t);
    let points: Vec<Vec<f64>> = (0..=len).map(|_| random_simplex_point(rng, layout, t)).collect();
    let boundary = t == 0.0 || t == -2.0;
    points
        .windows(2)
        .map(|w| {
            let common = rng.random_range(-2.0..2.0);
            let pinned_h: Vec<f64> = (0..m)
                .map(|_| match (member, boundary) {
                    (true, true) => 0.0,
                    (true, false) => common,
                    (false, _) => rng.random_range(-2.0..2.0),
                })
                .collect();
            arrow_between(&w[0], &w[1], t, &pinned_h)
        })
        .collect()
}
