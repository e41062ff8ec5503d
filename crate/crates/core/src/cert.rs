//! Assembly of the projective-Anosov verdict: ping-pong base points,
//! limit maps by nested-image iteration, transversality and dynamics
//! checks, the norm-ratio inequality over reduced words, and the
//! alpha_1-growth criterion. All word checks run to a finite length L
//! and the verdict records exactly that.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{CEps, RunConfig};
use crate::error::{Error, Result};
use crate::matrix::{singular_values, ScaledMatrix};
use crate::projective::{
    act, point_hyperplane_distance, proj_distance, random_point, ProjHyperplane, ProjPoint,
};
use crate::proximal::proximality_test_matrix;
use crate::schottky::{
    estimate_c_epsilon, power_search_inner, PowerSearchResult, SchottkyCertificate,
};
use crate::symmetric::{PoweredSet, ProximalityBundle, SymmetricSet};
use crate::words::{scan_reduced_words, Letter, ReducedWord};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Slack for word inequalities that hold with equality at the extremal
/// word when the constant is the estimated one.
const WORD_SLACK: f64 = 1e-9;

/// A certified epsilon-Schottky set with everything the limit-map
/// machinery needs: the powered set, its dual, the base fixed-point data
/// and the certificate.
#[derive(Debug, Clone)]
pub struct SchottkyData {
    pub set: PoweredSet,
    pub dual: PoweredSet,
    pub bundle: ProximalityBundle,
    pub epsilon: f64,
    pub certificate: SchottkyCertificate,
}

impl SchottkyData {
    /// Bundles a power-search result with the powered sets it certified.
    pub fn from_power_search(
        base: &SymmetricSet,
        result: &PowerSearchResult,
        gap_tol: f64,
    ) -> Result<Self> {
        let bundle = base.certify_biproximal(gap_tol)?;
        let set = base.powered(result.power);
        let dual = set.dual();
        Ok(Self {
            set,
            dual,
            bundle,
            epsilon: result.epsilon,
            certificate: result.certificate.clone(),
        })
    }

    pub fn rank(&self) -> usize {
        self.set.rank()
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }
}

/// A base point of the ping-pong region V and its dual counterpart W.
#[derive(Debug, Clone)]
pub struct PingPongBase {
    /// Point of `V`: at distance >= eps from every repelling hyperplane.
    pub v: ProjPoint,
    /// Element of `W` in the dual space, stored as the hyperplane whose
    /// conormal is the dual base point.
    pub w: ProjHyperplane,
}

/// Searches near an attracting line for a point of the intersection of
/// all far balls: start at the attracting line pushed distance `3 eps`
/// off the inverse's repelling hyperplane, then seeded random retries.
fn find_base_point(
    attracting: &ProjPoint,
    avoid: &ProjHyperplane,
    repelling: &[&ProjHyperplane],
    eps: f64,
    seed: u64,
    stream: u64,
) -> Result<ProjPoint> {
    let admissible = |p: &ProjPoint| -> Result<bool> {
        if proj_distance(p, attracting)? >= 5.0 * eps {
            return Ok(false);
        }
        if point_hyperplane_distance(p, avoid)? <= eps {
            return Ok(false);
        }
        for h in repelling {
            if point_hyperplane_distance(p, h)? < eps {
                return Ok(false);
            }
        }
        Ok(true)
    };

    // Deterministic first candidate: rotate the attracting representative
    // toward the conormal of the hyperplane to avoid, by chordal 3 eps.
    let u = attracting.rep();
    let n = avoid.conormal();
    let tangent = n - u * n.dot(u);
    if tangent.norm() > 1e-12 {
        let tangent = tangent.normalize();
        let phi = 2.0 * (1.5 * eps).min(1.0).asin();
        let candidate = ProjPoint::new(u * phi.cos() + tangent * phi.sin())?;
        if admissible(&candidate)? {
            return Ok(candidate);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    const ATTEMPTS: usize = 1000;
    for _ in 0..ATTEMPTS {
        let dir = random_point(u.len(), &mut rng);
        let tangent = dir.rep() - u * dir.rep().dot(u);
        if tangent.norm() < 1e-12 {
            continue;
        }
        let tangent = tangent.normalize();
        // chordal radius in (eps, 5 eps)
        let r = eps + rng.random::<f64>() * 4.0 * eps;
        let phi = 2.0 * (r / 2.0).min(1.0).asin();
        let candidate = ProjPoint::new(u * phi.cos() + tangent * phi.sin())?;
        if admissible(&candidate)? {
            return Ok(candidate);
        }
    }
    Err(Error::BasePointNotFound { attempts: ATTEMPTS })
}

/// Finds a primal base point `v` with `d(v, g_1^+) < 5 eps` and
/// `d(v, (g_1^-1)^-) > eps`, checked against every repelling hyperplane,
/// and the analogous dual point `w`.
pub fn ping_pong_base(data: &SchottkyData, seed: u64) -> Result<PingPongBase> {
    if data.epsilon <= 0.0 {
        return Err(Error::InvalidConfig("epsilon must be positive".into()));
    }
    let pair0 = data.set.pair(0);
    let primal_hyperplanes: Vec<&ProjHyperplane> =
        data.bundle.primal.iter().map(|d| &d.repelling).collect();
    let v = find_base_point(
        &data.bundle.primal[0].attracting,
        &data.bundle.primal[pair0].repelling,
        &primal_hyperplanes,
        data.epsilon,
        seed,
        10_000,
    )?;
    let dual_hyperplanes: Vec<&ProjHyperplane> =
        data.bundle.dual.iter().map(|d| &d.repelling).collect();
    let w_point = find_base_point(
        &data.bundle.dual[0].attracting,
        &data.bundle.dual[pair0].repelling,
        &dual_hyperplanes,
        data.epsilon,
        seed,
        10_001,
    )?;
    Ok(PingPongBase {
        v,
        w: w_point.to_dual_hyperplane(),
    })
}

/// One finite-depth approximation of the limit maps along a boundary
/// prefix.
#[derive(Debug, Clone)]
pub struct LimitMapSample {
    pub prefix: ReducedWord,
    pub depth: usize,
    /// Image of the base point under the first `depth` letters.
    pub xi: ProjPoint,
    /// Dual limit approximation at the same depth.
    pub theta: ProjHyperplane,
    /// Distance between the depth and depth+1 approximations of xi.
    pub depth_gap: f64,
    /// Same for theta, measured in the dual space.
    pub theta_depth_gap: f64,
}

/// Evaluates the nested-image approximation `x_0 ... x_(depth-1) (v)` of
/// the limit map, padding the prefix by repeating its last letter.
pub fn limit_map(
    data: &SchottkyData,
    base: &PingPongBase,
    prefix: &ReducedWord,
    depth: usize,
) -> Result<LimitMapSample> {
    if prefix.is_empty() {
        return Err(Error::InvalidConfig(
            "limit map needs a nonempty prefix".into(),
        ));
    }
    if depth < prefix.len() {
        return Err(Error::InvalidConfig(
            "depth must be at least the prefix length".into(),
        ));
    }
    prefix.check_rank(data.rank())?;
    let letters = prefix.padded(depth + 1);
    let w_point = base.w.to_dual_point();

    let mut primal = ScaledMatrix::identity(data.dim());
    let mut dual = ScaledMatrix::identity(data.dim());
    let mut xi = None;
    let mut theta = None;
    let mut xi_next = None;
    let mut theta_next = None;
    for (k, letter) in letters.letters().iter().enumerate() {
        primal = primal.mul(data.set.element(letter.index()));
        dual = dual.mul(data.dual.element(letter.index()));
        if k + 1 == depth {
            xi = Some(act(primal.matrix(), &base.v)?);
            theta = Some(act(dual.matrix(), &w_point)?);
        }
        if k + 1 == depth + 1 {
            xi_next = Some(act(primal.matrix(), &base.v)?);
            theta_next = Some(act(dual.matrix(), &w_point)?);
        }
    }
    let (xi, theta) = (xi.unwrap(), theta.unwrap());
    let (xi_next, theta_next) = (xi_next.unwrap(), theta_next.unwrap());
    Ok(LimitMapSample {
        prefix: prefix.clone(),
        depth,
        depth_gap: proj_distance(&xi, &xi_next)?,
        theta_depth_gap: proj_distance(&theta, &theta_next)?,
        xi,
        theta: theta.to_dual_hyperplane(),
    })
}

/// A uniformly random reduced word of the given length.
fn random_reduced_word<R: Rng>(rank: usize, len: usize, rng: &mut R) -> ReducedWord {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    for _ in 0..len {
        loop {
            let candidate = Letter(rng.random_range(0..2 * rank));
            if letters.last() != Some(&candidate.inverse()) {
                letters.push(candidate);
                break;
            }
        }
    }
    ReducedWord::from_reduced(letters).expect("construction is reduced")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransversalityReport {
    pub pairs_tested: u32,
    pub depth: usize,
    /// Minimum over pairs of the smallest singular value of the matrix
    /// `[xi(x) | orthonormal basis of theta(y)]`.
    pub min_singular_value: f64,
    pub worst_pair: (String, String),
    pub tol: f64,
    pub ok: bool,
}

/// Samples pairs of separated boundary prefixes and verifies that
/// `xi(x)` and `theta(y)` span, measured by the smallest singular value.
///
/// Pairs start with distinct letters: since `xi(y)` lies inside
/// `theta(y)`, the spanning margin of nearby boundary points collapses
/// like `eps^(r-1)` in the common prefix length r, so a fixed tolerance
/// is only meaningful on separated points. Deep splits are covered by
/// the injectivity check instead.
pub fn transversality_check(
    data: &SchottkyData,
    base: &PingPongBase,
    depth: usize,
    pairs: u32,
    seed: u64,
    tol: f64,
) -> Result<TransversalityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(20_000);
    let d = data.dim();
    let mut min_sv = f64::INFINITY;
    let mut worst = (String::new(), String::new());
    for _ in 0..pairs {
        let x = random_reduced_word(data.rank(), depth, &mut rng);
        let y = loop {
            let y = random_reduced_word(data.rank(), depth, &mut rng);
            // transversality is only claimed for distinct boundary points
            if y.letters()[0] != x.letters()[0] {
                break y;
            }
        };
        let xi = limit_map(data, base, &x, depth)?.xi;
        let theta = limit_map(data, base, &y, depth)?.theta;
        let basis = theta.basis();
        let mut m = DMatrix::zeros(d, d);
        m.column_mut(0).copy_from(xi.rep());
        for j in 0..d - 1 {
            m.column_mut(j + 1).copy_from(&basis.column(j));
        }
        let sv = singular_values(&m);
        let smallest = sv[sv.len() - 1];
        if smallest < min_sv {
            min_sv = smallest;
            worst = (x.display(data.set.base()), y.display(data.set.base()));
        }
    }
    Ok(TransversalityReport {
        pairs_tested: pairs,
        depth,
        min_singular_value: min_sv,
        worst_pair: worst,
        tol,
        ok: min_sv >= tol,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DynamicsEntry {
    pub name: String,
    /// `d(xi(g^infinity), g^+)` at the configured depth.
    pub primal_distance: f64,
    /// Dual-space distance of the theta limit from the dual fixed point.
    pub dual_distance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DynamicsReport {
    pub depth: usize,
    /// `eps^(depth-1) * sqrt(2)`: the nested-image diameter bound.
    pub bound: f64,
    pub entries: Vec<DynamicsEntry>,
    pub worst: f64,
    pub ok: bool,
}

/// For each element, iterates its own letter and compares the limit
/// against the attracting data: the approximation must be within the
/// nested-image diameter bound of the true fixed point.
pub fn dynamics_check(
    data: &SchottkyData,
    base: &PingPongBase,
    depth: usize,
) -> Result<DynamicsReport> {
    let bound = data.epsilon.powi(depth as i32 - 1) * SQRT_2;
    let mut entries = Vec::with_capacity(data.set.len());
    let mut worst: f64 = 0.0;
    for i in 0..data.set.len() {
        let ray = ReducedWord::from_reduced(vec![Letter(i)]).unwrap();
        let sample = limit_map(data, base, &ray, depth)?;
        let primal_distance = proj_distance(&sample.xi, &data.bundle.primal[i].attracting)?;
        let dual_distance = proj_distance(
            &sample.theta.to_dual_point(),
            &data.bundle.dual[i].attracting,
        )?;
        worst = worst.max(primal_distance).max(dual_distance);
        entries.push(DynamicsEntry {
            name: data.set.name(i),
            primal_distance,
            dual_distance,
        });
    }
    Ok(DynamicsReport {
        depth,
        bound,
        entries,
        worst,
        ok: worst <= bound,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenoistReport {
    pub c_eps: f64,
    pub max_len: usize,
    pub words_scanned: u64,
    /// Every word product must itself be proximal.
    pub all_proximal: bool,
    pub first_non_proximal: Option<String>,
    /// Minimum over words of `log ratio - (n + 2) log c_eps`.
    pub min_log_margin: f64,
    pub worst_word: String,
    pub ok: bool,
}

/// Checks, for every reduced word of length <= L in the powered set, that
/// the product is proximal and that the norm ratio satisfies
/// `||x_0...x_n|| / (||x_0|| ... ||x_n||) >= c_eps^(n+2)`.
pub fn benoist_check(
    data: &SchottkyData,
    c_eps: f64,
    max_len: usize,
    gap_tol: f64,
) -> Result<BenoistReport> {
    let log_c = c_eps.ln();
    let letter_log_norms: Vec<f64> = data
        .set
        .elements()
        .iter()
        .map(|e| e.log_operator_norm())
        .collect();
    let mut scanned = 0u64;
    let mut min_margin = f64::INFINITY;
    let mut worst: Vec<Letter> = Vec::new();
    let mut non_proximal: Option<Vec<Letter>> = None;
    scan_reduced_words(
        data.set.rank(),
        max_len,
        (ScaledMatrix::identity(data.dim()), 0.0f64),
        |(prod, letter_sum), letter| {
            (
                prod.mul(data.set.element(letter.index())),
                letter_sum + letter_log_norms[letter.index()],
            )
        },
        |word, (prod, letter_sum)| {
            scanned += 1;
            let n = word.len() - 1;
            let margin = (prod.log_operator_norm() - letter_sum) - (n as f64 + 2.0) * log_c;
            if margin < min_margin {
                min_margin = margin;
                worst = word.to_vec();
            }
            if non_proximal.is_none() && proximality_test_matrix(prod.matrix(), gap_tol).is_err() {
                non_proximal = Some(word.to_vec());
            }
        },
    );
    let display = |letters: &[Letter]| {
        letters
            .iter()
            .map(|l| data.set.name(l.index()))
            .collect::<Vec<_>>()
            .join("*")
    };
    let all_proximal = non_proximal.is_none();
    Ok(BenoistReport {
        c_eps,
        max_len,
        words_scanned: scanned,
        all_proximal,
        first_non_proximal: non_proximal.as_deref().map(display),
        min_log_margin: min_margin,
        worst_word: display(&worst),
        ok: all_proximal && min_margin >= -WORD_SLACK,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Alpha1GrowthReport {
    pub c_eps: f64,
    pub max_len: usize,
    /// `alpha_1(mu(g_i^n)) >= -3 log c_eps` for every element.
    pub hypothesis_ok: bool,
    pub hypothesis_values: Vec<f64>,
    /// Minimum over words of `alpha_1(mu(w)) + (n - 1) log c_eps`.
    pub min_slack: f64,
    pub worst_word: String,
    pub ok: bool,
}

/// Verifies the finite-depth growth bound
/// `alpha_1(mu(x_0...x_n)) >= -(n-1) log c_eps` over all reduced words of
/// length <= L, plus the per-generator hypothesis it relies on.
pub fn alpha1_growth_check(data: &SchottkyData, c_eps: f64, max_len: usize) -> Result<Alpha1GrowthReport> {
    let log_c = c_eps.ln();
    let wedges = data.set.wedge_elements();
    let hypothesis_values: Vec<f64> = data
        .set
        .elements()
        .iter()
        .zip(&wedges)
        .map(|(e, w)| 2.0 * e.log_operator_norm() - w.log_operator_norm())
        .collect();
    let hypothesis_ok = hypothesis_values.iter().all(|&a| a >= -3.0 * log_c);

    let mut min_slack = f64::INFINITY;
    let mut worst: Vec<Letter> = Vec::new();
    scan_reduced_words(
        data.set.rank(),
        max_len,
        (
            ScaledMatrix::identity(data.dim()),
            ScaledMatrix::identity(wedges[0].dim()),
        ),
        |(prod, wedge), letter| {
            (
                prod.mul(data.set.element(letter.index())),
                wedge.mul(&wedges[letter.index()]),
            )
        },
        |word, (prod, wedge)| {
            let alpha1 = 2.0 * prod.log_operator_norm() - wedge.log_operator_norm();
            let n = (word.len() - 1) as f64;
            let slack = alpha1 + (n - 1.0) * log_c;
            if slack < min_slack {
                min_slack = slack;
                worst = word.to_vec();
            }
        },
    );
    let worst_word = worst
        .iter()
        .map(|l| data.set.name(l.index()))
        .collect::<Vec<_>>()
        .join("*");
    Ok(Alpha1GrowthReport {
        c_eps,
        max_len,
        hypothesis_ok,
        hypothesis_values,
        min_slack,
        worst_word,
        ok: hypothesis_ok && min_slack >= -WORD_SLACK,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub pairs_tested: u32,
    pub depth: usize,
    /// Worst margin of the pulled-back images against their epsilon cores:
    /// `eps - d((common prefix)^-1 xi, letter^+)`, positive when inside.
    pub min_core_margin: f64,
    /// Minimum distance between the distinct core centers; disjointness
    /// of the cores needs this above `2 eps`.
    pub min_center_separation: f64,
    /// `d(xi(x), xi(y)) <= eps^(r-1) sqrt(2)` up to finite-depth slack.
    pub contraction_ok: bool,
    pub ok: bool,
}

/// Samples pairs of distinct prefixes and asserts the separation that
/// makes the limit map injective: after removing the common prefix, the
/// two images lie in the epsilon cores of the distinct next letters, and
/// those cores are disjoint.
pub fn injectivity_check(
    data: &SchottkyData,
    base: &PingPongBase,
    depth: usize,
    pairs: u32,
    seed: u64,
) -> Result<InjectivityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(30_000);
    let eps = data.epsilon;
    let mut min_core_margin = f64::INFINITY;
    let mut min_center_sep = f64::INFINITY;
    let mut contraction_ok = true;
    for _ in 0..pairs {
        let x = random_reduced_word(data.rank(), depth, &mut rng);
        let y = loop {
            let y = random_reduced_word(data.rank(), depth, &mut rng);
            if y != x {
                break y;
            }
        };
        let r = x.first_difference(&y).expect("words are distinct");
        let xi_x = limit_map(data, base, &x, depth)?.xi;
        let xi_y = limit_map(data, base, &y, depth)?.xi;

        // pull back by the inverse of the common prefix
        let mut inv = ScaledMatrix::identity(data.dim());
        for k in (0..r).rev() {
            let letter = x.letters()[k];
            inv = inv.mul(data.set.element(letter.inverse().index()));
        }
        let back_x = act(inv.matrix(), &xi_x)?;
        let back_y = act(inv.matrix(), &xi_y)?;
        let lx = x.letters()[r].index();
        let ly = y.letters()[r].index();
        let margin_x = eps - proj_distance(&back_x, &data.bundle.primal[lx].attracting)?;
        let margin_y = eps - proj_distance(&back_y, &data.bundle.primal[ly].attracting)?;
        min_core_margin = min_core_margin.min(margin_x).min(margin_y);
        let sep = proj_distance(
            &data.bundle.primal[lx].attracting,
            &data.bundle.primal[ly].attracting,
        )?;
        min_center_sep = min_center_sep.min(sep);

        // finite-depth check of the diameter bound at the split index
        if r >= 1 {
            let bound = eps.powi(r as i32 - 1) * SQRT_2 + 3.0 * eps.powi(depth as i32) * SQRT_2;
            if proj_distance(&xi_x, &xi_y)? > bound {
                contraction_ok = false;
            }
        }
    }
    Ok(InjectivityReport {
        pairs_tested: pairs,
        depth,
        min_core_margin,
        min_center_separation: min_center_sep,
        contraction_ok,
        ok: min_core_margin >= 0.0 && min_center_sep > 2.0 * eps && contraction_ok,
    })
}

/// Whether every contraction condition was certified by the closed-form
/// bound, or somewhere by sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictGrade {
    Analytic,
    Evidence,
}

/// The assembled conditional verdict: a Schottky certificate for the
/// certified power plus the five finite-depth checks. `pass` requires all
/// five booleans.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnosovVerdict {
    pub schottky: SchottkyCertificate,
    pub power: u32,
    pub epsilon: f64,
    pub c_eps_used: f64,
    pub c_eps_estimated: bool,
    /// Word-length bound of the norm and growth scans.
    pub word_depth: usize,
    /// Iteration depth of the limit-map checks.
    pub map_depth: usize,
    pub benoist_ok: bool,
    pub alpha1_growth_ok: bool,
    pub transversality_ok: bool,
    pub dynamics_ok: bool,
    pub injectivity_ok: bool,
    pub benoist: BenoistReport,
    pub alpha1_growth: Alpha1GrowthReport,
    pub transversality: TransversalityReport,
    pub dynamics: DynamicsReport,
    pub injectivity: InjectivityReport,
    pub grade: VerdictGrade,
}

impl AnosovVerdict {
    pub fn pass(&self) -> bool {
        self.benoist_ok
            && self.alpha1_growth_ok
            && self.transversality_ok
            && self.dynamics_ok
            && self.injectivity_ok
    }
}

/// Resolves the norm-ratio constant and the certified power together.
///
/// With a fixed constant this is one power scan. In estimate mode the
/// scan first runs without the alpha_1 condition, the constant is
/// estimated on the certified power, and the scan repeats until the
/// estimate is consistent with its own power. Returns the scan result,
/// the constant used, and whether it was estimated.
pub fn resolve_power_and_c(
    set: &SymmetricSet,
    config: &RunConfig,
) -> Result<(PowerSearchResult, f64, bool)> {
    let sampling = config.sampling();
    match config.c_eps {
        CEps::Fixed(c) => {
            let result = power_search_inner(
                set,
                Some(c),
                config.n_max,
                &sampling,
                config.gap_tol,
                config.pos_tol,
            )?;
            Ok((result, c, false))
        }
        CEps::Estimate => {
            let mut result = power_search_inner(
                set,
                None,
                config.n_max,
                &sampling,
                config.gap_tol,
                config.pos_tol,
            )?;
            for _ in 0..8 {
                let powered = set.powered(result.power);
                let estimate = estimate_c_epsilon(&powered, config.max_word_length)?;
                let c = estimate.c_hat;
                let threshold = -3.0 * c.ln();
                if result.alpha1_values.iter().all(|&a| a >= threshold) {
                    return Ok((result, c, true));
                }
                result = power_search_inner(
                    set,
                    Some(c),
                    config.n_max,
                    &sampling,
                    config.gap_tol,
                    config.pos_tol,
                )?;
            }
            Err(Error::Numerical(
                "estimated c_eps did not stabilize against the power scan".into(),
            ))
        }
    }
}

/// Runs the full pipeline: biproximality, well-positionedness, power
/// search, ping-pong base, and the five finite-depth checks.
pub fn certify_projective_anosov(set: &SymmetricSet, config: &RunConfig) -> Result<AnosovVerdict> {
    config.validate()?;
    let (result, c_eps, estimated) = resolve_power_and_c(set, config)?;
    let data = SchottkyData::from_power_search(set, &result, config.gap_tol)?;
    let base = ping_pong_base(&data, config.seed)?;

    let benoist = benoist_check(&data, c_eps, config.max_word_length, config.gap_tol)?;
    let alpha1_growth = alpha1_growth_check(&data, c_eps, config.max_word_length)?;
    let transversality = transversality_check(
        &data,
        &base,
        config.depth,
        config.pairs,
        config.seed,
        config.transv_tol,
    )?;
    let dynamics = dynamics_check(&data, &base, config.depth)?;
    let injectivity = injectivity_check(&data, &base, config.depth, config.pairs, config.seed)?;

    let all_ok = benoist.ok
        && alpha1_growth.ok
        && transversality.ok
        && dynamics.ok
        && injectivity.ok;
    let grade = if all_ok && data.certificate.is_analytic() {
        VerdictGrade::Analytic
    } else {
        VerdictGrade::Evidence
    };
    Ok(AnosovVerdict {
        power: result.power,
        epsilon: result.epsilon,
        c_eps_used: c_eps,
        c_eps_estimated: estimated,
        word_depth: config.max_word_length,
        map_depth: config.depth,
        benoist_ok: benoist.ok,
        alpha1_growth_ok: alpha1_growth.ok,
        transversality_ok: transversality.ok,
        dynamics_ok: dynamics.ok,
        injectivity_ok: injectivity.ok,
        schottky: data.certificate.clone(),
        benoist,
        alpha1_growth,
        transversality,
        dynamics,
        injectivity,
        grade,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::UnimodularMatrix;
    use crate::proximal::DEFAULT_GAP_TOL;
    use crate::schottky::{power_search, SamplingParams, DEFAULT_POS_TOL};

    fn unimod(d: usize, entries: &[f64]) -> UnimodularMatrix {
        UnimodularMatrix::from_matrix(nalgebra::DMatrix::from_row_slice(d, d, entries)).unwrap()
    }

    fn sl2_example() -> SymmetricSet {
        SymmetricSet::from_generators(vec![
            ("a".into(), unimod(2, &[4.0, 0.0, 0.0, 0.25])),
            ("b".into(), unimod(2, &[2.125, 1.875, 1.875, 2.125])),
        ])
        .unwrap()
    }

    fn certified_example() -> SchottkyData {
        let set = sl2_example();
        let result = power_search(
            &set,
            0.5,
            64,
            &SamplingParams::default(),
            DEFAULT_GAP_TOL,
            DEFAULT_POS_TOL,
        )
        .unwrap();
        SchottkyData::from_power_search(&set, &result, DEFAULT_GAP_TOL).unwrap()
    }

    #[test]
    fn base_point_satisfies_constraints() {
        let data = certified_example();
        let base = ping_pong_base(&data, 1).unwrap();
        let eps = data.epsilon;
        assert!(proj_distance(&base.v, &data.bundle.primal[0].attracting).unwrap() < 5.0 * eps);
        for j in 0..data.set.len() {
            let d =
                point_hyperplane_distance(&base.v, &data.bundle.primal[j].repelling).unwrap();
            assert!(d >= eps, "v too close to repelling hyperplane {j}: {d}");
            let dw = point_hyperplane_distance(
                &base.w.to_dual_point(),
                &data.bundle.dual[j].repelling,
            )
            .unwrap();
            assert!(dw >= eps, "w too close to dual hyperplane {j}: {dw}");
        }
    }

    #[test]
    fn degenerate_epsilon_rejected() {
        let mut data = certified_example();
        data.epsilon = 0.0;
        assert!(ping_pong_base(&data, 1).is_err());
    }

    #[test]
    fn limit_along_generator_ray_approaches_fixed_line() {
        let data = certified_example();
        let base = ping_pong_base(&data, 1).unwrap();
        let ray = ReducedWord::from_reduced(vec![Letter(0)]).unwrap();
        let sample = limit_map(&data, &base, &ray, 10).unwrap();
        let d = proj_distance(&sample.xi, &data.bundle.primal[0].attracting).unwrap();
        assert!(d <= data.epsilon.powi(9) * SQRT_2);
        assert!(sample.depth_gap <= data.epsilon.powi(10) * SQRT_2);
    }

    #[test]
    fn limit_of_shifted_ray_is_shifted_fixed_line() {
        // prefix b a a a ... tends to b(a^+)
        let data = certified_example();
        let base = ping_pong_base(&data, 1).unwrap();
        let prefix = ReducedWord::from_reduced(vec![Letter(2), Letter(0)]).unwrap();
        let sample = limit_map(&data, &base, &prefix, 12).unwrap();
        let expect = act(
            data.set.element(2).matrix(),
            &data.bundle.primal[0].attracting,
        )
        .unwrap();
        assert!(proj_distance(&sample.xi, &expect).unwrap() < 1e-6);
    }

    #[test]
    fn transversality_on_example() {
        let data = certified_example();
        let base = ping_pong_base(&data, 1).unwrap();
        let report = transversality_check(&data, &base, 8, 100, 1, 1e-6).unwrap();
        assert!(report.ok, "min singular value {}", report.min_singular_value);
    }

    #[test]
    fn dynamics_on_example() {
        let data = certified_example();
        let base = ping_pong_base(&data, 1).unwrap();
        let report = dynamics_check(&data, &base, 10).unwrap();
        assert!(report.ok, "worst {} bound {}", report.worst, report.bound);
    }

    #[test]
    fn benoist_with_estimated_constant_is_tight() {
        let data = certified_example();
        let est = estimate_c_epsilon(&data.set, 4).unwrap();
        let report = benoist_check(&data, est.c_hat, 4, DEFAULT_GAP_TOL).unwrap();
        assert!(report.ok);
        assert!(report.all_proximal);
        assert!(report.min_log_margin.abs() < 1e-9);
        assert_eq!(report.worst_word, est.extremal_word);
    }

    #[test]
    fn benoist_rejects_constant_above_estimate() {
        let data = certified_example();
        let est = estimate_c_epsilon(&data.set, 4).unwrap();
        let too_big = est.c_hat.sqrt();
        let report = benoist_check(&data, too_big, 4, DEFAULT_GAP_TOL).unwrap();
        assert!(!report.ok);
        assert!(report.min_log_margin < -1e-9);
        assert_eq!(report.worst_word, est.extremal_word);
    }

    #[test]
    fn alpha1_growth_on_example() {
        let data = certified_example();
        let est = estimate_c_epsilon(&data.set, 4).unwrap();
        let report = alpha1_growth_check(&data, est.c_hat, 4).unwrap();
        assert!(report.hypothesis_ok);
        assert!(report.ok, "min slack {}", report.min_slack);
    }

    #[test]
    fn full_pipeline_passes_on_example() {
        let set = sl2_example();
        let config = RunConfig {
            max_word_length: 4,
            pairs: 60,
            ..RunConfig::default()
        };
        let verdict = certify_projective_anosov(&set, &config).unwrap();
        assert!(verdict.pass());
        assert!(verdict.c_eps_estimated);
        assert!(verdict.power >= 1);
    }

    #[test]
    fn pipeline_rejects_duplicate_fixed_lines() {
        let set = SymmetricSet::from_generators(vec![
            ("a".into(), unimod(2, &[4.0, 0.0, 0.0, 0.25])),
            ("c".into(), unimod(2, &[16.0, 0.0, 0.0, 0.0625])),
        ])
        .unwrap();
        let err = certify_projective_anosov(&set, &RunConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NotWellPositioned(_)));
    }

    #[test]
    fn pipeline_rejects_rotations() {
        let (c, s) = ((0.7f64).cos(), (0.7f64).sin());
        let set =
            SymmetricSet::from_generators(vec![("r".into(), unimod(2, &[c, -s, s, c]))]).unwrap();
        let err = certify_projective_anosov(&set, &RunConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NotBiproximal { .. }));
    }
}
