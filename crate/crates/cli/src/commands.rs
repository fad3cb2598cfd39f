use anyhow::{ensure, Result};
use suffdiv::bregman::{affine_equivalent, bregman_divergence};
use suffdiv::portfolio::{doubling_rate, is_horse_race, regret_and_bound, simulate_wealth, solve_log_optimal};
use suffdiv::scoring::{
    default_grid_step, divergence_from_rule, expected_score, properness_witness, rule_from_generator, ScoringRule,
};
use suffdiv::sufficiency::classify_divergence;
use suffdiv::thermo::{extractable_energy, free_energy_identity_gap, gibbs_state, EnergyLevels, HeatBath};
use suffdiv::{entropy, kl_divergence, Error};

use crate::args::{
    BregmanArgs, Command, DivergenceArgs, PortfolioCommand, RegretArgs, RuleName, ScoreArgs, SimulateArgs,
    SuffcheckArgs, ThermoArgs,
};
use crate::input::{load_divergence, load_generator, load_market, parse_prob, parse_vector};
use crate::report::Report;

pub const DEFAULT_TOL: f64 = 1e-9;

pub struct Settings {
    pub bits: bool,
    pub tol: f64,
}

pub fn run(command: &Command, settings: &Settings) -> Result<Report> {
    match command {
        Command::Divergence(a) => divergence(a, settings),
        Command::Score(a) => score(a, settings),
        Command::Suffcheck(a) => suffcheck(a, settings),
        Command::Portfolio(PortfolioCommand::Solve(a)) => {
            let market = load_market(&a.market)?;
            let sol = solve_log_optimal(&market, settings.tol)?;
            if !sol.converged {
                return Err(Error::NonConvergence {
                    iterations: sol.iterations,
                    residual: sol.kkt_residual,
                }
                .into());
            }
            let mut r = Report::new("portfolio solve", settings.bits);
            r.reals("b", sol.portfolio.as_slice())
                .info("W", sol.rate)
                .real("kkt_residual", sol.kkt_residual)
                .field("iterations", &sol.iterations)?;
            Ok(r)
        }
        Command::Portfolio(PortfolioCommand::Simulate(a)) => simulate(a, settings),
        Command::Portfolio(PortfolioCommand::Regret(a)) => regret(a, settings),
        Command::Thermo(a) => thermo(a, settings),
        Command::Bregman(a) => bregman(a, settings),
    }
}

fn divergence(a: &DivergenceArgs, s: &Settings) -> Result<Report> {
    let p = parse_prob(&a.p, "--p")?;
    let q = parse_prob(&a.q, "--q")?;
    let mut r = Report::new("divergence", s.bits);
    r.info("kl", kl_divergence(&p, &q)?)
        .info("entropy_p", entropy(&p))
        .info("entropy_q", entropy(&q));
    Ok(r)
}

fn score(a: &ScoreArgs, s: &Settings) -> Result<Report> {
    let p = parse_prob(&a.p, "--P")?;
    let q = parse_prob(&a.q, "--Q")?;
    let dim = p.dim();
    let rule = match a.rule {
        RuleName::Log => ScoringRule::log(dim),
        RuleName::Brier => ScoringRule::brier(dim),
        RuleName::Burg => ScoringRule::burg(dim),
        RuleName::Linear => ScoringRule::linear(dim),
        RuleName::FromGenerator => {
            let name = a.generator.as_deref().expect("clap requires --generator");
            rule_from_generator(load_generator(name)?, vec![0.0; dim])?
        }
    };
    let step = a.grid_step.unwrap_or_else(|| default_grid_step(dim));
    let witness = properness_witness(&rule, dim, step)?;

    let expected = expected_score(&rule, &p, &q)?;
    let divergence = divergence_from_rule(&rule, &p, &q)?;
    let mut r = Report::new("score", s.bits);
    r.field("rule", &rule.name())?;
    if a.rule == RuleName::Log {
        r.info("score", expected).info("divergence", divergence);
    } else {
        r.real("score", expected).real("divergence", divergence);
    }
    r.field("grid_step", &step)?
        .field("proper", &witness.is_none())?
        .field("witness", &witness)?;
    Ok(r)
}

fn suffcheck(a: &SuffcheckArgs, s: &Settings) -> Result<Report> {
    let divergence = load_divergence(&a.divergence)?;
    let mut report = classify_divergence(&divergence, &a.dims, a.trials, a.seed)?;
    if a.summary {
        report.trials.clear();
    }
    let mut r = Report::new("suffcheck", s.bits);
    r.extend(&report)?;
    Ok(r)
}

fn simulate(a: &SimulateArgs, s: &Settings) -> Result<Report> {
    let market = load_market(&a.market.market)?;
    let b = parse_prob(&a.b, "--b")?;
    ensure!(a.n >= 1, "--n must be at least 1");
    let path = simulate_wealth(&market, &b, a.n, a.seed)?;
    let mut r = Report::new("portfolio simulate", s.bits);
    r.field("n", &a.n)?
        .field("seed", &a.seed)?
        .info("W", doubling_rate(&b, &market)?)
        .info("terminal_rate", path.terminal_rate);
    if a.path {
        r.info_path("log_wealth", &path.log_wealth);
    }
    Ok(r)
}

fn regret(a: &RegretArgs, s: &Settings) -> Result<Report> {
    let market = load_market(&a.market.market)?;
    let q = parse_prob(&a.q, "--Q")?;
    let rb = regret_and_bound(&market, &q, s.tol)?;
    let mut r = Report::new("portfolio regret", s.bits);
    r.info("regret", rb.regret)
        .info("bound", rb.bound)
        .info("gap", rb.gap)
        .field("horse_race", &is_horse_race(&market))?;
    Ok(r)
}

fn thermo(a: &ThermoArgs, s: &Settings) -> Result<Report> {
    let bath = HeatBath::new(a.temperature)?;
    let levels = EnergyLevels::new(parse_vector(&a.levels, "--levels")?)?;
    let state = parse_prob(&a.state, "--state")?;
    ensure!(
        state.dim() == levels.dim(),
        "--state has {} entries but --levels has {}",
        state.dim(),
        levels.dim()
    );
    let gibbs = gibbs_state(&levels, &bath);
    let mut r = Report::new("thermo", s.bits);
    r.real("temperature_K", bath.temperature())
        .real("kT_joules", bath.kt())
        .reals("gibbs", gibbs.as_slice())
        .real("Ex_joules", extractable_energy(&state, &gibbs, &bath)?)
        .real("identity_gap", free_energy_identity_gap(&state, &levels, &bath)?);
    Ok(r)
}

fn bregman(a: &BregmanArgs, s: &Settings) -> Result<Report> {
    let generator = load_generator(&a.generator)?;
    let p = parse_prob(&a.p, "--p")?;
    let q = parse_prob(&a.q, "--q")?;
    let mut r = Report::new("bregman", s.bits);
    r.field("generator", &generator.name())?
        .real("divergence", bregman_divergence(generator.as_ref(), &p, &q)?);
    if let Some(other) = &a.compare {
        let other = load_generator(other)?;
        r.field("compare", &other.name())?
            .field("affine_equivalent", &affine_equivalent(generator.as_ref(), other.as_ref(), p.dim()))?;
    }
    Ok(r)
}
