//! The learning loops: score-based, strategy-based and asynchronous.

use serde::{Deserialize, Serialize};

use super::noise::NoiseModel;
use super::revision::{DelayModel, ProfileHistory, RevisionProcess, RevisionSampler};
use super::rng::{sample_index, Substream, ACTION, DELAY, INIT, NOISE, REVISION};
use super::schedule::StepSchedule;
use super::update::{gibbs_increment, score_increment, step_bound_for_payoffs, strategy_increment};
use crate::entropy::{Entropy, Kernel};
use crate::error::{Error, Result};
use crate::games::FiniteGame;
use crate::profile::MixedProfile;

/// Scores beyond this magnitude abort a score-based run.
pub const SCORE_BLOWUP: f64 = 1e6;
/// Coordinates below this are a hard simplex violation.
pub const NEGATIVE_TOL: f64 = -1e-14;
/// Allowed drift of a strategy's coordinate sum.
pub const SUM_TOL: f64 = 1e-12;
/// Payoffs may exceed `[0, 1]` by this much.
const PAYOFF_RANGE_TOL: f64 = 1e-12;

/// Which iterations to keep.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "at", rename_all = "kebab-case")]
pub enum RecordMode {
    /// Every iteration, including the initial state as `n = 0`.
    #[default]
    Full,
    /// Only the listed iterations (those past the end are skipped).
    Checkpoints(Vec<usize>),
    /// Only the final state.
    FinalOnly,
}

impl RecordMode {
    fn keeps(&self, n: usize, last: usize) -> bool {
        match self {
            RecordMode::Full => true,
            RecordMode::Checkpoints(at) => at.contains(&n),
            RecordMode::FinalOnly => n == last,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LearnerOptions {
    pub temperature: f64,
    pub schedule: StepSchedule,
    pub iterations: usize,
    pub seed: u64,
    pub replicate: u64,
    pub noise: NoiseModel,
    pub record: RecordMode,
    /// Starting strategies; uniform when absent.
    pub initial: Option<MixedProfile>,
    /// Permits `T = 0` in the strategy-based learners.
    pub allow_zero_temperature: bool,
}

impl LearnerOptions {
    pub fn new(temperature: f64, schedule: StepSchedule, iterations: usize, seed: u64) -> Self {
        LearnerOptions {
            temperature,
            schedule,
            iterations,
            seed,
            replicate: 0,
            noise: NoiseModel::None,
            record: RecordMode::Full,
            initial: None,
            allow_zero_temperature: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub n: usize,
    /// Actions played at step `n` (empty for the initial state).
    pub actions: Vec<usize>,
    /// Payoff each player observed, `None` for players that did not revise.
    pub payoffs: Vec<Option<f64>>,
    /// Mixed strategies after the step.
    pub profile: MixedProfile,
    /// Full scores after the step (score-based learning only).
    pub scores: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    /// Some score left `[−1e6, 1e6]` at this iteration; the run stopped there.
    ScoreBlowUp {
        iteration: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnerRun {
    pub seed: u64,
    pub replicate: u64,
    /// Iterations actually carried out.
    pub iterations: usize,
    pub records: Vec<StepRecord>,
    pub final_profile: MixedProfile,
    pub final_scores: Option<Vec<Vec<f64>>>,
    pub status: RunStatus,
    /// Smallest coordinate seen before any roundoff clamp.
    pub min_coordinate: f64,
    /// Largest `|Σ_α x_kα − 1|` seen.
    pub max_sum_error: f64,
}

impl LearnerRun {
    /// The recorded profile at iteration `n`.
    pub fn profile_at(&self, n: usize) -> Option<&MixedProfile> {
        self.records.iter().find(|r| r.n == n).map(|r| &r.profile)
    }
}

/// Dirichlet(1, …, 1) initial strategies for a replicate.
pub fn dirichlet_profile(action_counts: &[usize], seed: u64, replicate: u64) -> MixedProfile {
    use rand::Rng;
    let mut stream = Substream::new(seed, replicate, INIT);
    MixedProfile(
        action_counts
            .iter()
            .enumerate()
            .map(|(k, &n)| {
                let rng = stream.at(k as u64, 0);
                let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
                let s: f64 = e.iter().sum();
                e.iter().map(|v| v / s).collect()
            })
            .collect(),
    )
}

fn check_common(game: &FiniteGame, opts: &LearnerOptions) -> Result<()> {
    if opts.iterations == 0 {
        return Err(Error::invalid("iterations must be at least 1"));
    }
    if !opts.temperature.is_finite() {
        return Err(Error::invalid("temperature must be finite"));
    }
    opts.schedule.validate()?;
    opts.noise.validate()?;
    if let Some(x0) = &opts.initial {
        x0.validate(game.action_counts())?;
    }
    Ok(())
}

fn sample_actions(x: &MixedProfile, stream: &mut Substream, n: usize, out: &mut [usize]) {
    for (k, a) in out.iter_mut().enumerate() {
        *a = sample_index(x.player(k), stream.uniform(k as u64, n as u64));
    }
}

/// Score-based learning: each player samples from `X_k = Q(Y_k)`, observes
/// the payoff `û` of the action `â` drawn and moves only that score,
/// `Y_â ← Y_â + γ_n (û − T Y_â)/X_â`.
///
/// Boundedness of the scores is not guaranteed, so a run stops with
/// [`RunStatus::ScoreBlowUp`] once a score leaves `±1e6`.
pub fn run_score_learner(
    game: &FiniteGame,
    entropy: &Entropy,
    opts: &LearnerOptions,
) -> Result<LearnerRun> {
    check_common(game, opts)?;
    let n_players = game.num_players();
    let mut y: Vec<Vec<f64>> = match &opts.initial {
        None => game.action_counts().iter().map(|&n| vec![0.0; n]).collect(),
        Some(x0) => x0
            .blocks()
            .iter()
            .map(|xk| {
                let z = entropy.relative_scores(xk)?;
                Ok(std::iter::once(0.0).chain(z).collect())
            })
            .collect::<Result<_>>()?,
    };
    let mut x = MixedProfile(
        y.iter()
            .map(|yk| entropy.choice(yk))
            .collect::<Result<_>>()?,
    );
    let mut action_stream = Substream::new(opts.seed, opts.replicate, ACTION);
    let mut noise_stream = Substream::new(opts.seed, opts.replicate, NOISE);
    let mut records = Vec::new();
    let last = opts.iterations;
    if opts.record.keeps(0, last) {
        records.push(StepRecord {
            n: 0,
            actions: vec![],
            payoffs: vec![],
            profile: x.clone(),
            scores: Some(y.clone()),
        });
    }
    let mut actions = vec![0; n_players];
    let mut observed = vec![1.0; n_players];
    let mut status = RunStatus::Completed;
    let mut done = 0;
    for n in 1..=opts.iterations {
        sample_actions(&x, &mut action_stream, n, &mut actions);
        let gamma = opts.schedule.step(n);
        let mut blown = false;
        for k in 0..n_players {
            let a = actions[k];
            let u =
                game.payoff(k, &actions) + opts.noise.sample(&mut noise_stream, k, n, observed[k]);
            observed[k] = u;
            let yk = &mut y[k];
            yk[a] += score_increment(opts.temperature, gamma, yk[a], x.player(k)[a], u);
            if !(yk[a].abs() <= SCORE_BLOWUP) {
                blown = true;
            }
        }
        done = n;
        if blown {
            status = RunStatus::ScoreBlowUp { iteration: n };
            break;
        }
        for k in 0..n_players {
            x.0[k] = entropy.choice(&y[k])?;
        }
        if opts.record.keeps(n, last) {
            records.push(StepRecord {
                n,
                actions: actions.clone(),
                payoffs: observed.iter().map(|&v| Some(v)).collect(),
                profile: x.clone(),
                scores: Some(y.clone()),
            });
        }
    }
    Ok(LearnerRun {
        seed: opts.seed,
        replicate: opts.replicate,
        iterations: done,
        records,
        min_coordinate: x.min_coordinate(),
        max_sum_error: x.max_sum_error(),
        final_profile: x,
        final_scores: Some(y),
        status,
    })
}

/// Strategy-based learning: all players sample simultaneously, observe their
/// realized (possibly perturbed) payoffs and update every coordinate of their
/// mixed strategy with [`strategy_increment`] (or its Gibbs form).
///
/// Payoffs must lie in `[0, 1]`. Under noise of bound `b` the observed payoff
/// is shifted by `+b` before the update; the shift does not change the
/// expected increment and keeps the estimate nonnegative. The schedule must
/// respect [`step_bound_for_payoffs`] with payoff ceiling `1 + 2b`.
pub fn run_strategy_learner(
    game: &FiniteGame,
    entropy: &Entropy,
    opts: &LearnerOptions,
) -> Result<LearnerRun> {
    run_async_learner(
        game,
        entropy,
        opts,
        &RevisionProcess::Synchronous,
        &DelayModel::none(),
    )
}

/// Asynchronous strategy-based learning with delayed feedback. At step `n`
/// every player plays, but only the players in the revision set update, each
/// with `γ` indexed by its own update count. A revising player's payoff is
/// computed against the opponents' actions from `τ` steps earlier, with `τ`
/// drawn from `delay`.
pub fn run_async_learner(
    game: &FiniteGame,
    entropy: &Entropy,
    opts: &LearnerOptions,
    revision: &RevisionProcess,
    delay: &DelayModel,
) -> Result<LearnerRun> {
    check_common(game, opts)?;
    let kernel = entropy.kernel().ok_or_else(|| {
        Error::Unsupported(format!(
            "strategy-based learning needs a kernel entropy, got {}",
            entropy.name()
        ))
    })?;
    let t = opts.temperature;
    if t < 0.0 || (t == 0.0 && !opts.allow_zero_temperature) {
        return Err(Error::Precondition(format!(
            "strategy-based learning needs T > 0 (T = 0 only when explicitly allowed), got {t}"
        )));
    }
    let n_players = game.num_players();
    revision.validate(n_players)?;
    for (k, &(lo, hi)) in game.payoff_bounds().iter().enumerate() {
        if lo < -PAYOFF_RANGE_TOL || hi > 1.0 + PAYOFF_RANGE_TOL {
            return Err(Error::Precondition(format!(
                "player {k} payoffs span [{lo}, {hi}], outside [0, 1]"
            )));
        }
    }
    let shift = opts.noise.bound();
    let payoff_max = 1.0 + 2.0 * shift;
    for &n in game.action_counts() {
        let cap = step_bound_for_payoffs(entropy, t, n, payoff_max)?;
        if opts.schedule.max_step() > cap {
            return Err(Error::Precondition(format!(
                "largest step {} exceeds the simplex-safe ceiling {cap} for {n} actions",
                opts.schedule.max_step()
            )));
        }
    }
    let mut x = opts
        .initial
        .clone()
        .unwrap_or_else(|| MixedProfile::uniform(game.action_counts()));
    if !x.is_interior() {
        return Err(Error::domain("initial strategies must have full support"));
    }

    let mut action_stream = Substream::new(opts.seed, opts.replicate, ACTION);
    let mut noise_stream = Substream::new(opts.seed, opts.replicate, NOISE);
    let mut delay_stream = Substream::new(opts.seed, opts.replicate, DELAY);
    let mut revision_stream = Substream::new(opts.seed, opts.replicate, REVISION);
    let mut sampler = RevisionSampler::new(revision);
    let mut history = ProfileHistory::new(delay.max_delay, n_players);

    let last = opts.iterations;
    let mut records = Vec::new();
    if opts.record.keeps(0, last) {
        records.push(StepRecord {
            n: 0,
            actions: vec![],
            payoffs: vec![],
            profile: x.clone(),
            scores: None,
        });
    }
    let mut actions = vec![0; n_players];
    let mut revising = vec![true; n_players];
    let mut counts = vec![0usize; n_players];
    let mut observed = vec![1.0; n_players];
    let mut payoffs: Vec<Option<f64>> = vec![None; n_players];
    let mut seen = vec![0usize; n_players];
    let mut delta: Vec<Vec<f64>> = game.action_counts().iter().map(|&n| vec![0.0; n]).collect();
    let mut min_coordinate = x.min_coordinate();
    let mut max_sum_error = x.max_sum_error();

    for n in 1..=opts.iterations {
        sample_actions(&x, &mut action_stream, n, &mut actions);
        history.push(n, &actions);
        sampler.draw(revision, &mut revision_stream, n, &mut revising);
        // Every payoff is computed before anyone moves.
        for k in 0..n_players {
            payoffs[k] = None;
            if !revising[k] {
                continue;
            }
            let tau = delay.sample(&mut delay_stream, k, n);
            let u = if tau == 0 {
                game.payoff(k, &actions)
            } else {
                seen.copy_from_slice(history.back(tau));
                seen[k] = actions[k];
                game.payoff(k, &seen)
            };
            let perceived = u + opts.noise.sample(&mut noise_stream, k, n, observed[k]);
            observed[k] = perceived;
            payoffs[k] = Some(perceived);
            counts[k] += 1;
            let gamma = opts.schedule.step(counts[k]);
            let xk = x.player(k);
            match kernel {
                Kernel::Gibbs => {
                    gibbs_increment(t, gamma, xk, actions[k], perceived + shift, &mut delta[k])
                }
                _ => strategy_increment(
                    kernel,
                    t,
                    gamma,
                    xk,
                    actions[k],
                    perceived + shift,
                    &mut delta[k],
                ),
            }
        }
        for k in 0..n_players {
            if payoffs[k].is_none() {
                continue;
            }
            let xk = x.player_mut(k);
            let mut sum = 0.0;
            for (v, d) in xk.iter_mut().zip(&delta[k]) {
                *v += d;
                if v.is_nan() {
                    return Err(Error::SimplexViolation {
                        iteration: n,
                        message: format!("player {k} strategy became NaN"),
                    });
                }
                min_coordinate = min_coordinate.min(*v);
                if *v < NEGATIVE_TOL {
                    return Err(Error::SimplexViolation {
                        iteration: n,
                        message: format!("player {k} coordinate {v:e} is negative"),
                    });
                }
                if *v < 0.0 {
                    *v = 0.0;
                }
                sum += *v;
            }
            let err = (sum - 1.0).abs();
            max_sum_error = max_sum_error.max(err);
            if err > SUM_TOL {
                return Err(Error::SimplexViolation {
                    iteration: n,
                    message: format!("player {k} coordinates sum to 1 + {:e}", sum - 1.0),
                });
            }
        }
        if opts.record.keeps(n, last) {
            records.push(StepRecord {
                n,
                actions: actions.clone(),
                payoffs: payoffs.clone(),
                profile: x.clone(),
                scores: None,
            });
        }
    }
    Ok(LearnerRun {
        seed: opts.seed,
        replicate: opts.replicate,
        iterations: opts.iterations,
        records,
        final_profile: x,
        final_scores: None,
        status: RunStatus::Completed,
        min_coordinate,
        max_sum_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2_schedule() -> StepSchedule {
        StepSchedule::ShiftedPower {
            c: 1.0,
            a: 5.0,
            b: 0.6,
        }
    }

    #[test]
    fn zero_game_goes_uniform() {
        let g = FiniteGame::zero(vec![3, 2]);
        let mut o = LearnerOptions::new(1.0, fig2_schedule(), 3000, 3);
        o.initial = Some(MixedProfile::new(vec![vec![0.7, 0.2, 0.1], vec![0.9, 0.1]]));
        o.record = RecordMode::FinalOnly;
        let r = run_strategy_learner(&g, &Entropy::gibbs(), &o).unwrap();
        assert!(r.final_profile.dist_inf(&MixedProfile::uniform(&[3, 2])) < 1e-3);
        assert_eq!(r.records.len(), 1);
    }

    #[test]
    fn reproducible() {
        let g = FiniteGame::coordination();
        let o = LearnerOptions::new(0.2, fig2_schedule(), 200, 11);
        let a = run_strategy_learner(&g, &Entropy::tsallis(0.5).unwrap(), &o);
        assert!(matches!(a, Err(Error::Precondition(_))));
        let a = run_strategy_learner(&g, &Entropy::gibbs(), &o).unwrap();
        let b = run_strategy_learner(&g, &Entropy::gibbs(), &o).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_temperature_gated() {
        let g = FiniteGame::coordination();
        let mut o = LearnerOptions::new(0.0, fig2_schedule(), 10, 1);
        assert!(run_strategy_learner(&g, &Entropy::gibbs(), &o).is_err());
        o.allow_zero_temperature = true;
        assert!(run_strategy_learner(&g, &Entropy::gibbs(), &o).is_ok());
    }

    #[test]
    fn score_learner_single_action() {
        let g = FiniteGame::new(vec![1], vec![vec![0.8]]).unwrap();
        let o = LearnerOptions::new(0.5, StepSchedule::Harmonic { c: 4.0 }, 5000, 0);
        let r = run_score_learner(&g, &Entropy::gibbs(), &o).unwrap();
        let y = r.final_scores.unwrap()[0][0];
        assert!((y - 1.6).abs() < 1e-2, "{y}");
    }

    #[test]
    fn dirichlet_is_on_simplex() {
        let x = dirichlet_profile(&[2, 3], 5, 9);
        x.validate(&[2, 3]).unwrap();
        assert_eq!(x, dirichlet_profile(&[2, 3], 5, 9));
        assert_ne!(x, dirichlet_profile(&[2, 3], 5, 10));
    }
}
