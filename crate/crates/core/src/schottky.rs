//! The Schottky conditions: well-positioned sets, epsilon-proximality
//! with an analytic contraction bound and a Monte-Carlo fallback, the
//! epsilon-Schottky pairwise separation for a set and its dual, the power
//! search, and the empirical norm-ratio constant.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ProximalCondition, Result};
use crate::matrix::{singular_values, ScaledMatrix, UnimodularMatrix};
use crate::projective::{
    act, alignment_from_chordal, point_hyperplane_distance, proj_distance, sample_far_point,
    ProjHyperplane, ProjPoint,
};
use crate::proximal::proximality_test;
use crate::symmetric::{PoweredSet, ProximalityBundle, SymmetricSet};
use crate::words::scan_reduced_words;

/// Relative slack on the pairwise threshold `6 eps`. The threshold is met
/// with exact equality at the extremal pair when `eps = eps_1 / 6`, so
/// the comparison must not fail on the last ulp of that division.
const PAIR_SLACK: f64 = 1e-9;

/// Default tolerance below which a well-positioned margin counts as zero.
pub const DEFAULT_POS_TOL: f64 = 1e-8;

/// Monte-Carlo sampling parameters; the seed is split per element so
/// certificate entries do not depend on evaluation order.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SamplingParams {
    pub samples: u32,
    pub seed: u64,
}

impl Default for SamplingParams {
    fn default() -> Self {
        Self {
            samples: 200,
            seed: 1,
        }
    }
}

/// Outcome of the well-positioned test: both margins and their argmins.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WellPositionedVerdict {
    /// Minimum of `d(g_i^+, g_j^+)` over i != j.
    pub min_attracting_distance: f64,
    pub attracting_argmin: (usize, usize),
    /// Minimum of `d(g_i^+, g_k^-)` over pairs with `g_k != g_i^-1`;
    /// this is the quantity `eps_1` feeding the epsilon recipe.
    pub min_point_hyperplane: f64,
    pub hyperplane_argmin: (usize, usize),
    pub pos_tol: f64,
    pub ok: bool,
}

impl WellPositionedVerdict {
    pub fn failure_message(&self, set: &SymmetricSet) -> String {
        if self.min_attracting_distance <= self.pos_tol {
            let (i, j) = self.attracting_argmin;
            format!(
                "attracting lines of {} and {} coincide (d = {:e})",
                set.name(i),
                set.name(j),
                self.min_attracting_distance
            )
        } else {
            let (i, k) = self.hyperplane_argmin;
            format!(
                "attracting line of {} lies in the repelling hyperplane of {} (d = {:e})",
                set.name(i),
                set.name(k),
                self.min_point_hyperplane
            )
        }
    }
}

/// Distances `D[i][k] = d(g_i^+, g_k^-)` for every ordered pair.
fn fixed_point_distances(bundle: &[crate::proximal::ProximalData]) -> Result<Vec<Vec<f64>>> {
    let n = bundle.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            d[i][k] =
                point_hyperplane_distance(&bundle[i].attracting, &bundle[k].repelling)?;
        }
    }
    Ok(d)
}

fn well_positioned_verdict(
    set: &SymmetricSet,
    bundle: &ProximalityBundle,
    pos_tol: f64,
) -> Result<WellPositionedVerdict> {
    let n = set.len();
    if n == 0 {
        return Err(Error::DegenerateSet);
    }
    let mut min_attr = f64::INFINITY;
    let mut attr_arg = (0, 0);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = proj_distance(
                &bundle.primal[i].attracting,
                &bundle.primal[j].attracting,
            )?;
            if d < min_attr {
                min_attr = d;
                attr_arg = (i, j);
            }
        }
    }
    let dist = fixed_point_distances(&bundle.primal)?;
    let mut min_ph = f64::INFINITY;
    let mut ph_arg = (0, 0);
    for i in 0..n {
        for k in 0..n {
            if k == set.pair(i) {
                continue;
            }
            if dist[i][k] < min_ph {
                min_ph = dist[i][k];
                ph_arg = (i, k);
            }
        }
    }
    Ok(WellPositionedVerdict {
        min_attracting_distance: min_attr,
        attracting_argmin: attr_arg,
        min_point_hyperplane: min_ph,
        hyperplane_argmin: ph_arg,
        pos_tol,
        ok: min_attr > pos_tol && min_ph > pos_tol,
    })
}

/// Checks that all attracting lines are distinct and that no attracting
/// line lies in the repelling hyperplane of a non-inverse element.
pub fn check_well_positioned(
    set: &SymmetricSet,
    gap_tol: f64,
    pos_tol: f64,
) -> Result<WellPositionedVerdict> {
    let bundle = set.certify_biproximal(gap_tol)?;
    well_positioned_verdict(set, &bundle, pos_tol)
}

/// `eps = eps_1 / 6` where `eps_1` is the minimal point-hyperplane margin
/// of the well-positioned verdict. Power-invariant: `g^n` has the same
/// fixed points as `g`.
pub fn compute_epsilon(set: &SymmetricSet, gap_tol: f64, pos_tol: f64) -> Result<f64> {
    let verdict = check_well_positioned(set, gap_tol, pos_tol)?;
    if !verdict.ok {
        return Err(Error::NotWellPositioned(verdict.failure_message(set)));
    }
    Ok(verdict.min_point_hyperplane / 6.0)
}

pub(crate) fn epsilon_from_verdict(verdict: &WellPositionedVerdict) -> f64 {
    verdict.min_point_hyperplane / 6.0
}

/// How a contraction condition was certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceMethod {
    /// The closed-form singular-value bound already sits below `eps`.
    Analytic,
    /// Worst case over seeded Monte-Carlo samples of the far ball.
    Sampled,
}

/// A certified value together with how it was obtained.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContractionEvidence {
    pub value: f64,
    pub method: EvidenceMethod,
    pub samples: u32,
}

/// Evidence that one matrix is epsilon-proximal: separation of its fixed
/// points, a Lipschitz constant for its action on the far ball, and the
/// worst distance of far-ball images from the attracting line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpsilonProximalCert {
    pub epsilon: f64,
    pub separation: f64,
    pub lipschitz: ContractionEvidence,
    pub image_containment: ContractionEvidence,
}

impl EpsilonProximalCert {
    pub fn is_analytic(&self) -> bool {
        self.lipschitz.method == EvidenceMethod::Analytic
            && self.image_containment.method == EvidenceMethod::Analytic
    }
}

/// A small random step from `x` staying inside `B(h, eps)`.
fn perturb_within_ball<R: rand::Rng>(
    x: &ProjPoint,
    h: &ProjHyperplane,
    eps: f64,
    rng: &mut R,
) -> Option<ProjPoint> {
    for _ in 0..8 {
        let step = 10f64.powf(-6.0 + 5.0 * rng.random::<f64>());
        let mut dir = nalgebra::DVector::zeros(x.dim());
        for i in 0..x.dim() {
            dir[i] = crate::projective::gaussian(rng);
        }
        let tangent = &dir - x.rep() * dir.dot(x.rep());
        if tangent.norm() < 1e-12 {
            continue;
        }
        let candidate = ProjPoint::new(x.rep() + tangent.normalize() * step).ok()?;
        if point_hyperplane_distance(&candidate, h).ok()? >= eps {
            return Some(candidate);
        }
    }
    None
}

/// Closed-form contraction bounds from the singular frame.
///
/// For unit x with alignment `s = |<n, x>| >= s_eps` against the
/// repelling conormal, `||g x|| >= Lambda_1 s_eps`, while wedges grow by
/// at most `sigma_1 sigma_2`; converting the sine metric to the chordal
/// one costs a factor sqrt(2). This yields
///   Lipschitz on B(g^-, eps)  <=  sqrt(2) s1 s2 / (Lambda_1 s_eps)^2
///   d(g x, g^+)               <=  sqrt(2) s1 s2 / (Lambda_1^2 s_eps)
/// both invariant under rescaling of g.
fn analytic_bounds(action: &ScaledMatrix, eps: f64) -> (f64, f64) {
    let sv = singular_values(action.matrix());
    let (s1, s2) = (sv[0], sv[1]);
    let top = action
        .matrix()
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    let s_eps = alignment_from_chordal(eps);
    if top <= 0.0 || s_eps <= 0.0 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    let lip = sqrt2 * s1 * s2 / (top * s_eps).powi(2);
    let img = sqrt2 * s1 * s2 / (top * top * s_eps);
    (lip, img)
}

/// Inner epsilon-proximality check against precomputed fixed-point data.
/// `stream` splits the seed per element.
fn eps_proximal_cert(
    name: &str,
    action: &ScaledMatrix,
    attracting: &ProjPoint,
    repelling: &ProjHyperplane,
    eps: f64,
    sampling: &SamplingParams,
    stream: u64,
) -> Result<EpsilonProximalCert> {
    let separation = point_hyperplane_distance(attracting, repelling)?;
    if separation < 2.0 * eps {
        return Err(Error::ConditionFailed {
            name: name.to_string(),
            condition: ProximalCondition::Separation,
            margin: 2.0 * eps - separation,
        });
    }
    let (lip_bound, img_bound) = analytic_bounds(action, eps);

    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    rng.set_stream(stream);

    let lipschitz = if lip_bound <= eps {
        ContractionEvidence {
            value: lip_bound,
            method: EvidenceMethod::Analytic,
            samples: 0,
        }
    } else {
        // Alternate independent pairs (global quotients) with nearby pairs
        // (local derivative quotients); the supremum is typically attained
        // in the local regime near the ball boundary.
        let mut worst: f64 = 0.0;
        for k in 0..sampling.samples {
            let x = sample_far_point(repelling, eps, &mut rng);
            let y = if k % 2 == 0 {
                sample_far_point(repelling, eps, &mut rng)
            } else {
                match perturb_within_ball(&x, repelling, eps, &mut rng) {
                    Some(y) => y,
                    None => sample_far_point(repelling, eps, &mut rng),
                }
            };
            let base = proj_distance(&x, &y)?;
            if base < 1e-13 {
                continue;
            }
            let image = proj_distance(&act(action.matrix(), &x)?, &act(action.matrix(), &y)?)?;
            worst = worst.max(image / base);
        }
        if worst > eps {
            return Err(Error::ConditionFailed {
                name: name.to_string(),
                condition: ProximalCondition::Lipschitz,
                margin: worst - eps,
            });
        }
        ContractionEvidence {
            value: worst,
            method: EvidenceMethod::Sampled,
            samples: sampling.samples,
        }
    };

    let image_containment = if img_bound <= eps {
        ContractionEvidence {
            value: img_bound,
            method: EvidenceMethod::Analytic,
            samples: 0,
        }
    } else {
        let mut worst: f64 = 0.0;
        for _ in 0..sampling.samples {
            let x = sample_far_point(repelling, eps, &mut rng);
            let d = proj_distance(&act(action.matrix(), &x)?, attracting)?;
            worst = worst.max(d);
        }
        if worst > eps {
            return Err(Error::ConditionFailed {
                name: name.to_string(),
                condition: ProximalCondition::ImageContainment,
                margin: worst - eps,
            });
        }
        ContractionEvidence {
            value: worst,
            method: EvidenceMethod::Sampled,
            samples: sampling.samples,
        }
    };

    Ok(EpsilonProximalCert {
        epsilon: eps,
        separation,
        lipschitz,
        image_containment,
    })
}

/// Public single-matrix check: proves or samples the three conditions of
/// epsilon-proximality for `g`.
pub fn check_epsilon_proximal(
    g: &UnimodularMatrix,
    eps: f64,
    samples: u32,
    seed: u64,
    gap_tol: f64,
) -> Result<EpsilonProximalCert> {
    if eps <= 0.0 {
        return Err(Error::InvalidConfig("eps must be positive".into()));
    }
    let data = proximality_test(g, gap_tol).map_err(|reason| Error::NotBiproximal {
        index: 0,
        name: "g".into(),
        reason,
    })?;
    eps_proximal_cert(
        "g",
        &ScaledMatrix::from(g),
        &data.attracting,
        &data.repelling,
        eps,
        &SamplingParams { samples, seed },
        0,
    )
}

/// Per-element evidence for an element and its dual.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElementSchottkyCert {
    pub name: String,
    pub primal: EpsilonProximalCert,
    pub dual: EpsilonProximalCert,
}

/// The pairwise table `d(g_i^+, (g_j^-1)^-)` and its dual counterpart.
/// Entries at `j == i` and at the inverse pair are not constrained and
/// stay `None`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairwiseEvidence {
    pub threshold: f64,
    pub primal: Vec<Vec<Option<f64>>>,
    pub dual: Vec<Vec<Option<f64>>>,
    pub primal_min: f64,
    pub dual_min: f64,
}

/// Full evidence that `S^n` and its dual are epsilon-Schottky.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchottkyCertificate {
    pub epsilon: f64,
    pub power: u32,
    pub per_element: Vec<ElementSchottkyCert>,
    pub pairwise: PairwiseEvidence,
    /// Worst margin of the derived containment
    /// `b(g_i^+, eps) subset B(g_j^-, eps)`, i.e. `min d(g_i^+, g_j^-) - 2 eps`.
    pub containment_margin: f64,
}

impl SchottkyCertificate {
    pub fn is_analytic(&self) -> bool {
        self.per_element
            .iter()
            .all(|e| e.primal.is_analytic() && e.dual.is_analytic())
    }
}

fn pairwise_table(
    set_len: usize,
    pair: impl Fn(usize) -> usize,
    dist: &[Vec<f64>],
    threshold: f64,
) -> Result<(Vec<Vec<Option<f64>>>, f64)> {
    let mut table = vec![vec![None; set_len]; set_len];
    let mut min = f64::INFINITY;
    for i in 0..set_len {
        for j in 0..set_len {
            if i == j {
                continue;
            }
            // d(g_i^+, (g_j^-1)^-) = D[i][pair(j)]
            let d = dist[i][pair(j)];
            table[i][j] = Some(d);
            min = min.min(d);
            if d < threshold * (1.0 - PAIR_SLACK) {
                return Err(Error::PairTooClose {
                    i,
                    j,
                    distance: d,
                    required: threshold,
                });
            }
        }
    }
    Ok((table, min))
}

fn schottky_cert_inner(
    primal_set: &PoweredSet,
    dual_set: &PoweredSet,
    bundle: &ProximalityBundle,
    eps: f64,
    sampling: &SamplingParams,
) -> Result<SchottkyCertificate> {
    let n = primal_set.len();
    let threshold = 6.0 * eps;

    let primal_dist = fixed_point_distances(&bundle.primal)?;
    let dual_dist = fixed_point_distances(&bundle.dual)?;
    let (primal_table, primal_min) =
        pairwise_table(n, |i| primal_set.pair(i), &primal_dist, threshold)?;
    let (dual_table, dual_min) = pairwise_table(n, |i| dual_set.pair(i), &dual_dist, threshold)?;

    let mut per_element = Vec::with_capacity(n);
    for i in 0..n {
        let name = primal_set.name(i);
        let primal = eps_proximal_cert(
            &name,
            primal_set.element(i),
            &bundle.primal[i].attracting,
            &bundle.primal[i].repelling,
            eps,
            sampling,
            2 * i as u64,
        )?;
        let dual = eps_proximal_cert(
            &format!("{name}*"),
            dual_set.element(i),
            &bundle.dual[i].attracting,
            &bundle.dual[i].repelling,
            eps,
            sampling,
            2 * i as u64 + 1,
        )?;
        per_element.push(ElementSchottkyCert {
            name,
            primal,
            dual,
        });
    }

    let mut containment_margin = f64::INFINITY;
    for i in 0..n {
        for k in 0..n {
            if k == primal_set.pair(i) {
                continue;
            }
            containment_margin = containment_margin.min(primal_dist[i][k] - 2.0 * eps);
        }
    }

    Ok(SchottkyCertificate {
        epsilon: eps,
        power: primal_set.power(),
        per_element,
        pairwise: PairwiseEvidence {
            threshold,
            primal: primal_table,
            dual: dual_table,
            primal_min,
            dual_min,
        },
        containment_margin,
    })
}

/// Checks that a powered set and its dual are epsilon-Schottky: every
/// element and dual element is epsilon-proximal and every admissible
/// pairwise distance is at least `6 eps`.
pub fn check_epsilon_schottky(
    set: &PoweredSet,
    eps: f64,
    sampling: &SamplingParams,
    gap_tol: f64,
) -> Result<SchottkyCertificate> {
    if eps <= 0.0 {
        return Err(Error::InvalidConfig("eps must be positive".into()));
    }
    let bundle = set.base().certify_biproximal(gap_tol)?;
    let dual = set.dual();
    schottky_cert_inner(set, &dual, &bundle, eps, sampling)
}

/// Why one power failed during the scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PowerFailure {
    Element {
        name: String,
        condition: String,
        margin: f64,
    },
    PairTooClose {
        i: usize,
        j: usize,
        distance: f64,
        required: f64,
    },
    Alpha1TooSmall {
        name: String,
        alpha1: f64,
        required: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerAttempt {
    pub n: u32,
    pub failure: PowerFailure,
}

/// Result of the minimal-power scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerSearchResult {
    pub power: u32,
    pub epsilon: f64,
    pub certificate: SchottkyCertificate,
    /// `alpha_1(mu(g_i^n))` for each element at the certified power.
    pub alpha1_values: Vec<f64>,
    pub alpha1_threshold: f64,
    /// Diagnostics for every power below the answer.
    pub attempts: Vec<PowerAttempt>,
}

/// Scans `n = 1, 2, ...` for the least power at which `S^n` and its dual
/// are epsilon-Schottky (with `eps = eps_1 / 6` from the base set) and
/// `alpha_1(mu(g_i^n)) >= -3 log(c_eps)` for every element.
///
/// `c_eps = None` drops the alpha_1 condition (the limit `c_eps -> 1`).
pub(crate) fn power_search_inner(
    set: &SymmetricSet,
    c_eps: Option<f64>,
    n_max: u32,
    sampling: &SamplingParams,
    gap_tol: f64,
    pos_tol: f64,
) -> Result<PowerSearchResult> {
    let bundle = set.certify_biproximal(gap_tol)?;
    let verdict = well_positioned_verdict(set, &bundle, pos_tol)?;
    if !verdict.ok {
        return Err(Error::NotWellPositioned(verdict.failure_message(set)));
    }
    let eps = epsilon_from_verdict(&verdict);
    let alpha_threshold = c_eps.map(|c| -3.0 * c.ln()).unwrap_or(0.0);

    let dual_base = set.dual_set();
    let n_elems = set.len();
    let base_scaled: Vec<ScaledMatrix> =
        set.elements().iter().map(ScaledMatrix::from).collect();
    let dual_scaled: Vec<ScaledMatrix> =
        dual_base.elements().iter().map(ScaledMatrix::from).collect();
    let base_wedge: Vec<ScaledMatrix> = set.powered(1).wedge_elements();

    let mut primal_pow = base_scaled.clone();
    let mut dual_pow = dual_scaled.clone();
    let mut wedge_pow = base_wedge.clone();

    let mut attempts = Vec::new();
    let mut closest = f64::INFINITY;

    for n in 1..=n_max {
        if n > 1 {
            for i in 0..n_elems {
                primal_pow[i] = primal_pow[i].mul(&base_scaled[i]);
                dual_pow[i] = dual_pow[i].mul(&dual_scaled[i]);
                wedge_pow[i] = wedge_pow[i].mul(&base_wedge[i]);
            }
        }
        // alpha_1(mu(g^n)) = 2 log ||g^n|| - log ||wedge^2 g^n||, computed
        // in log domain so arbitrarily large powers cannot overflow.
        let alpha1s: Vec<f64> = (0..n_elems)
            .map(|i| 2.0 * primal_pow[i].log_operator_norm() - wedge_pow[i].log_operator_norm())
            .collect();
        let mut failure: Option<PowerFailure> = None;
        if let Some((i, &a)) = alpha1s
            .iter()
            .enumerate()
            .find(|(_, &a)| a < alpha_threshold)
        {
            closest = closest.min(alpha_threshold - a);
            failure = Some(PowerFailure::Alpha1TooSmall {
                name: format!("{}^{}", set.name(i), n),
                alpha1: a,
                required: alpha_threshold,
            });
        }
        if failure.is_none() {
            let primal_set =
                PoweredSet::from_parts(set.clone(), n, primal_pow.clone());
            let dual_set =
                PoweredSet::from_parts(dual_base.clone(), n, dual_pow.clone());
            match schottky_cert_inner(&primal_set, &dual_set, &bundle, eps, sampling) {
                Ok(certificate) => {
                    return Ok(PowerSearchResult {
                        power: n,
                        epsilon: eps,
                        certificate,
                        alpha1_values: alpha1s,
                        alpha1_threshold: alpha_threshold,
                        attempts,
                    });
                }
                Err(Error::ConditionFailed {
                    name,
                    condition,
                    margin,
                }) => {
                    closest = closest.min(margin);
                    failure = Some(PowerFailure::Element {
                        name,
                        condition: condition.to_string(),
                        margin,
                    });
                }
                Err(Error::PairTooClose {
                    i,
                    j,
                    distance,
                    required,
                }) => {
                    closest = closest.min(required - distance);
                    failure = Some(PowerFailure::PairTooClose {
                        i,
                        j,
                        distance,
                        required,
                    });
                }
                Err(other) => return Err(other),
            }
        }
        attempts.push(PowerAttempt {
            n,
            failure: failure.expect("loop reaches here only on failure"),
        });
    }
    Err(Error::Exhausted { n_max, closest })
}

/// Public power search; `c_eps` must lie in `(0, 1)`.
pub fn power_search(
    set: &SymmetricSet,
    c_eps: f64,
    n_max: u32,
    sampling: &SamplingParams,
    gap_tol: f64,
    pos_tol: f64,
) -> Result<PowerSearchResult> {
    if !(0.0 < c_eps && c_eps < 1.0) {
        return Err(Error::InvalidConfig(
            "c_eps must lie strictly between 0 and 1".into(),
        ));
    }
    power_search_inner(set, Some(c_eps), n_max, sampling, gap_tol, pos_tol)
}

/// Empirical norm-ratio constant over all reduced words of length
/// `1..=max_len`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CEpsEstimate {
    /// `min_w (||w|| / prod ||letters||)^(1/(n+2))` with `n = len(w) - 1`.
    pub c_hat: f64,
    pub extremal_word: String,
    pub extremal_letters: Vec<usize>,
    pub words_scanned: u64,
}

/// Scans all reduced words of the powered set in log domain and returns
/// the largest constant consistent with every enumerated word. Words of
/// length one always have ratio 1, so `c_hat <= 1`.
pub fn estimate_c_epsilon(set: &PoweredSet, max_len: usize) -> Result<CEpsEstimate> {
    if max_len < 1 {
        return Err(Error::InvalidConfig(
            "word length bound must be at least 1".into(),
        ));
    }
    let letter_log_norms: Vec<f64> = set
        .elements()
        .iter()
        .map(|e| e.log_operator_norm())
        .collect();
    let mut best_root = f64::INFINITY;
    let mut extremal: Vec<usize> = Vec::new();
    let mut scanned = 0u64;
    scan_reduced_words(
        set.rank(),
        max_len,
        (ScaledMatrix::identity(set.dim()), 0.0f64),
        |(prod, letter_sum), letter| {
            (
                prod.mul(set.element(letter.index())),
                letter_sum + letter_log_norms[letter.index()],
            )
        },
        |word, (prod, letter_sum)| {
            scanned += 1;
            let log_ratio = prod.log_operator_norm() - letter_sum;
            let root = log_ratio / (word.len() + 1) as f64;
            if root < best_root {
                best_root = root;
                extremal = word.iter().map(|l| l.index()).collect();
            }
        },
    );
    let extremal_word = extremal
        .iter()
        .map(|&i| set.name(i))
        .collect::<Vec<_>>()
        .join("*");
    Ok(CEpsEstimate {
        c_hat: best_root.exp(),
        extremal_word,
        extremal_letters: extremal,
        words_scanned: scanned,
    })
}

/// Re-derives per-element proximality from the powered matrices
/// themselves (rather than from the base set); used by consistency tests.
pub fn powered_proximality(set: &PoweredSet, gap_tol: f64) -> Result<Vec<crate::proximal::ProximalData>> {
    set.elements()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let normalized = UnimodularMatrix::from_product(e.matrix().clone())?;
            proximality_test(&normalized, gap_tol).map_err(|reason| Error::NotBiproximal {
                index: i,
                name: set.name(i),
                reason,
            })
        })
        .collect()
}
