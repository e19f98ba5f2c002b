//! Subcommand implementations. Every output is computed in memory first
//! and written in a fixed order, so identical configs give identical files.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use symdyn::genericity::{build_ball_system, density_witness, pu_membership, residual_scan, BallSystem};
use symdyn::glue::{
    build_schedule_with_growth, construct_universal_point, verify_eq5, verify_step2, vfx_density_report,
    GluingSchedule, GluingTarget, GluingTargetSequence, UniversalPoint,
};
use symdyn::genericity::base_point_for;
use symdyn::hyperbolicity::{theorem2_pipeline, DiagonalCocycle, Theorem2Options};
use symdyn::measures::{empirical_measure, epsilon_net, weak_star_distance, PeriodicMeasure};
use symdyn::rational::{self, format as fmt};
use symdyn::{LocallyConstant, ScheduledPoint, Sft, Word};

use crate::config::{ExperimentConfig, Resolved};
use crate::manifest::{sha256_hex, Outputs, RunManifest, MANIFEST_FILE};
use crate::CliError;

/// Decimal places of the plot columns.
pub const DECIMALS: usize = 12;

fn dec(r: &BigRational) -> String {
    rational::to_decimal(r, DECIMALS)
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Artifact(format!("cannot read {}: {e}", path.display())))
}

/// A loaded config with its SFT.
#[derive(Clone, Debug)]
pub struct Context {
    pub config: ExperimentConfig,
    pub resolved: Resolved,
    pub sft: Sft,
    pub base_word: Word,
    pub out_dir: PathBuf,
}

impl Context {
    pub fn load(config_path: &Path, out: Option<&Path>) -> Result<Self, CliError> {
        let config = ExperimentConfig::load(config_path)?;
        let base_dir = config_path.parent().unwrap_or(Path::new(""));
        Self::from_config(config, base_dir, out)
    }

    /// Relative paths in the config are taken from `base_dir`.
    pub fn from_config(config: ExperimentConfig, base_dir: &Path, out: Option<&Path>) -> Result<Self, CliError> {
        let resolved = config.resolve()?;
        let sft_path = base_dir.join(&config.sft);
        let text = std::fs::read_to_string(&sft_path)
            .map_err(|e| CliError::Config(format!("cannot read SFT file {}: {e}", sft_path.display())))?;
        let sft = Sft::parse_text(&text).map_err(|e| CliError::Config(format!("{}: {e}", sft_path.display())))?;
        let base_word: Word = config
            .base_word
            .parse()
            .map_err(|e: symdyn::Error| CliError::Config(format!("base_word: {e}")))?;
        sft.check_admissible(&base_word).map_err(|e| CliError::Config(format!("base_word: {e}")))?;
        let out_dir = out.map(Path::to_path_buf).unwrap_or_else(|| base_dir.join(&config.output_dir));
        Ok(Context { config, resolved, sft, base_word, out_dir })
    }

    /// The net and its table.
    pub fn net(&self) -> Result<(Vec<PeriodicMeasure>, String), CliError> {
        let c = &self.config;
        let mut table = String::from("index,orbit,period\n");
        let (elements, footer) = if c.prune_net {
            let net = epsilon_net(&self.sft, &self.resolved.epsilon, c.depth, c.period_cap, c.samples, c.seed)?;
            let footer = format!(
                "# samples={} worst={} epsilon={}\n",
                net.samples_checked,
                fmt(&net.worst_sample_distance),
                fmt(&self.resolved.epsilon)
            );
            (net.elements, footer)
        } else {
            let all = self
                .sft
                .enumerate_periodic(c.period_cap)
                .into_iter()
                .map(|o| PeriodicMeasure::new(o, c.depth))
                .collect::<Result<Vec<_>, _>>()?;
            (all, String::new())
        };
        for (i, y) in elements.iter().enumerate() {
            table.push_str(&format!("{i},{},{}\n", y.orbit, y.orbit.period()));
        }
        table.push_str(&footer);
        Ok((elements, table))
    }

    /// The net cycled `rounds` times, or cut or extended to `stages` entries.
    pub fn targets(&self, net: &[PeriodicMeasure]) -> Vec<GluingTarget> {
        let count = self.config.stages.unwrap_or(self.config.rounds * net.len());
        net.iter()
            .cycle()
            .take(count)
            .map(|y| GluingTarget { orbit: y.orbit.clone(), radius: self.resolved.epsilon.clone() })
            .collect()
    }

    /// The glued point with `delta = 2^{-k0}` started in the base cylinder.
    pub fn universal_point(&self, targets: &[GluingTarget]) -> Result<UniversalPoint, CliError> {
        let base = base_point_for(&self.base_word, &self.sft)?;
        let seq = GluingTargetSequence::new(&self.sft, base, self.config.k0, targets.to_vec())?;
        let schedule = build_schedule_with_growth(&seq, &self.sft, self.resolved.growth.as_deref())?;
        Ok(construct_universal_point(&schedule)?)
    }

    pub fn cocycles(&self) -> Result<Vec<(String, DiagonalCocycle)>, CliError> {
        if self.config.cocycle.is_empty() {
            return Err(CliError::Config("no [[cocycle]] entries".into()));
        }
        self.config
            .cocycle
            .iter()
            .map(|c| {
                let parse = |v: &[String]| v.iter().map(|s| rational::parse(s).expect("validated")).collect();
                let cocycle = DiagonalCocycle::new(&self.sft, parse(&c.u), parse(&c.v), c.block)
                    .map_err(|e| CliError::Config(format!("cocycle {}: {e}", c.name)))?;
                Ok((c.name.clone(), cocycle))
            })
            .collect()
    }

    fn theorem2_options(&self, flip_nuh: bool) -> Theorem2Options {
        Theorem2Options {
            eta: self.resolved.eta.clone(),
            onset: self.config.hyperbolicity.onset,
            n_check: self.config.hyperbolicity.n_check,
            growth: self.resolved.growth.clone(),
            flip_nuh,
        }
    }

    fn ball_system(&self, net: &[PeriodicMeasure]) -> Result<BallSystem, CliError> {
        let r = &self.resolved;
        Ok(build_ball_system(&self.sft, net, self.config.balls.rounds, &r.base_radius, &r.shrink)?)
    }

    fn finish(&self, command: &str, outputs: Outputs, started: Instant) -> Result<(), CliError> {
        let record = outputs.write(&self.out_dir, command, &self.config.to_toml(), started)?;
        for o in &record.outputs {
            println!("wrote {} sha256={}", self.out_dir.join(&o.file).display(), o.sha256);
        }
        Ok(())
    }
}

/// `n,period,M_n,a_n,b_n,pad` per stage.
pub fn schedule_table(schedule: &GluingSchedule) -> String {
    let mut s = String::from("n,period,M_n,a_n,b_n,pad\n");
    for st in &schedule.stages {
        s.push_str(&format!("{},{},{},{},{},{}\n", st.n, st.period, st.gap, st.a, st.b, st.pad));
    }
    s
}

/// `2^{1-n} / p_n`.
pub fn stage_bound(n: usize, period: usize) -> BigRational {
    rational::pow2_signed(1 - n as i64) / rational::from_int(&BigInt::from(period))
}

/// Runs the structural and sampled shadowing check at every stage.
pub fn check_shadowing(up: &UniversalPoint, samples: usize, seed: u64) -> Result<(), CliError> {
    for st in &up.schedule.stages {
        verify_eq5(up, st.n, samples, seed).map_err(|e| match e {
            symdyn::Error::Violation { stage, witness } => {
                CliError::Bound(format!("shadowing estimate fails at stage {stage}, witness j = {witness}"))
            }
            other => other.into(),
        })?;
    }
    Ok(())
}

/// Averages of every cylinder indicator of length at most `depth` at every
/// checkpoint against the target orbit means.
pub fn averages_table(up: &UniversalPoint, sft: &Sft, depth: usize) -> Result<String, CliError> {
    let mut s = String::from("stage,cylinder,lhs,modulus,bound,lhs_decimal,bound_decimal\n");
    let words: Vec<Word> = (1..=depth).flat_map(|l| sft.admissible_words(l)).collect();
    for st in &up.schedule.stages {
        for w in &words {
            let r = verify_step2(up, st.n, &LocallyConstant::indicator(w), sft)?;
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                st.n,
                w,
                fmt(&r.lhs),
                fmt(&r.modulus),
                fmt(&r.bound),
                dec(&r.lhs),
                dec(&r.bound)
            ));
        }
    }
    Ok(s)
}

/// `rho_L(nu_{b_n}, Y_n)` per stage.
pub fn convergence_rho(up: &UniversalPoint, n: usize, depth: usize) -> Result<BigRational, CliError> {
    let st = up.schedule.stage(n)?;
    let nu = empirical_measure(&up.point, &st.b, depth)?;
    let y = PeriodicMeasure::new(st.orbit.clone(), depth)?;
    Ok(weak_star_distance(&nu.marginals, &y.marginals, depth)?)
}

pub fn convergence_table(up: &UniversalPoint, depth: usize) -> Result<String, CliError> {
    let mut s = String::from("stage,period,horizon,rho,rho_decimal,bound,bound_decimal\n");
    for st in &up.schedule.stages {
        let rho = convergence_rho(up, st.n, depth)?;
        let bound = stage_bound(st.n, st.period);
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            st.n,
            st.period,
            st.b,
            fmt(&rho),
            dec(&rho),
            fmt(&bound),
            dec(&bound)
        ));
    }
    Ok(s)
}

pub fn density_table(up: &UniversalPoint, net: &[PeriodicMeasure], depth: usize) -> Result<String, CliError> {
    let mut s = String::from("orbit,best_stage,rho,rho_decimal\n");
    for row in vfx_density_report(up, net, depth)? {
        s.push_str(&format!("{},{},{},{}\n", row.orbit, row.best_stage, fmt(&row.distance), dec(&row.distance)));
    }
    Ok(s)
}

pub fn build(ctx: &Context) -> Result<(), CliError> {
    let started = Instant::now();
    let (net, net_csv) = ctx.net()?;
    let up = ctx.universal_point(&ctx.targets(&net))?;
    let mut out = Outputs::default();
    out.add("schedule.json", up.schedule.to_json() + "\n");
    out.add("point.json", up.point.to_json() + "\n");
    out.add("schedule.csv", schedule_table(&up.schedule));
    out.add("net.csv", net_csv);
    if let Some(last) = up.schedule.stages.last() {
        println!("{} stages, b_{} = {}", up.schedule.stages.len(), last.n, last.b);
    }
    ctx.finish("build", out, started)
}

fn load_schedule(path: &Path) -> Result<UniversalPoint, CliError> {
    let schedule = GluingSchedule::from_json(&read(path)?)?;
    construct_universal_point(&schedule).map_err(|e| CliError::Bound(format!("{}: {e}", path.display())))
}

fn load_point(path: &Path) -> Result<ScheduledPoint, CliError> {
    ScheduledPoint::from_json(&read(path)?).map_err(|e| CliError::Artifact(format!("{}: {e}", path.display())))
}

pub fn theorem1(ctx: &Context, schedule: Option<&Path>, point: Option<&Path>) -> Result<(), CliError> {
    let started = Instant::now();
    let depth = ctx.config.depth;
    let (net, _) = ctx.net()?;
    let mut up = match schedule {
        Some(p) => load_schedule(p)?,
        None => ctx.universal_point(&ctx.targets(&net))?,
    };
    if let Some(p) = point {
        up.point = load_point(p)?;
    }
    check_shadowing(&up, ctx.config.shadow_samples, ctx.config.seed)?;
    let mut out = Outputs::default();
    out.add("averages.csv", averages_table(&up, &ctx.sft, depth)?);
    out.add("convergence.csv", convergence_table(&up, depth)?);
    out.add("density.csv", density_table(&up, &net, depth)?);
    println!("all averaging bounds hold over {} stages", up.schedule.stages.len());
    ctx.finish("theorem1", out, started)
}

fn theorem2_report(
    ctx: &Context,
    name: &str,
    c: &DiagonalCocycle,
    targets: &[GluingTarget],
    flip: bool,
) -> Result<symdyn::hyperbolicity::Theorem2Report, CliError> {
    theorem2_pipeline(&ctx.sft, &ctx.base_word, c, targets, &ctx.theorem2_options(flip)).map_err(|e| match e {
        symdyn::Error::InconsistentVerdicts(_) | symdyn::Error::BoundViolated { .. } => {
            CliError::Inconsistent(format!("cocycle {name}: {e}"))
        }
        other => other.into(),
    })
}

pub fn certificate_json(report: &symdyn::hyperbolicity::Theorem2Report) -> String {
    serde_json::to_string_pretty(report).expect("report serialises") + "\n"
}

pub fn theorem2(ctx: &Context, inject_fault: bool) -> Result<(), CliError> {
    let started = Instant::now();
    let cocycles = ctx.cocycles()?;
    let (net, _) = ctx.net()?;
    let targets = ctx.targets(&net);
    let mut out = Outputs::default();
    let mut verdicts = String::from("cocycle,nuh,cao,cao_at_eta,predicted_nuh,log_c,log_lambda\n");
    for (name, c) in &cocycles {
        let rep = theorem2_report(ctx, name, c, &targets, inject_fault)?;
        let (log_c, log_lambda) = match &rep.uniform {
            Some(u) => (fmt(&u.log_c), fmt(&u.log_lambda)),
            None => ("none".to_string(), "none".to_string()),
        };
        let word = |b: bool| if b { "pass" } else { "fail" };
        println!("{name}: nuh={} cao={} log C = {log_c} log lambda = {log_lambda}", word(rep.nuh.pass), word(rep.cao.pass));
        verdicts.push_str(&format!(
            "{name},{},{},{},{},{log_c},{log_lambda}\n",
            word(rep.nuh.pass),
            word(rep.cao.pass),
            rep.cao_at_eta,
            rep.predicted_nuh
        ));
        let mut rows = String::from("stage,horizon,avg_e,avg_f,avg_e_decimal,avg_f_decimal,ok\n");
        for r in &rep.nuh.rows {
            rows.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.stage,
                r.horizon,
                fmt(&r.avg_e),
                fmt(&r.avg_f),
                dec(&r.avg_e),
                dec(&r.avg_f),
                r.ok
            ));
        }
        out.add(format!("certificate_{name}.json"), certificate_json(&rep));
        out.add(format!("nuh_{name}.csv"), rows);
    }
    out.add("verdicts.csv", verdicts);
    ctx.finish("theorem2", out, started)
}

pub fn balls_table(system: &BallSystem, net: &[PeriodicMeasure]) -> String {
    let mut s = String::from("ball,orbit,round,v_radius,u_radius\n");
    for (i, p) in system.pairs.iter().enumerate() {
        s.push_str(&format!("{i},{},{},{},{}\n", net[p.net_index].orbit, p.round, fmt(&p.v.radius), fmt(&p.u.radius)));
    }
    s
}

pub fn scan(ctx: &Context) -> Result<(), CliError> {
    let started = Instant::now();
    let (net, _) = ctx.net()?;
    let system = ctx.ball_system(&net)?;
    let targets = ctx.targets(&net);
    let report = residual_scan(&ctx.sft, ctx.config.scan_depth, &system, &targets, ctx.resolved.growth.as_deref())?;
    let mut out = Outputs::default();
    out.add("scan.csv", report.to_csv());
    out.add("balls.csv", balls_table(&system, &net));
    ctx.finish("scan", out, started)?;
    let failures = report.failures();
    println!(
        "{} cylinders x {} balls, {} absent",
        report.cylinders.len(),
        system.pairs.len(),
        failures.len()
    );
    if failures.is_empty() {
        Ok(())
    } else {
        let list: Vec<String> = failures.iter().map(|r| format!("{}/{}", r.cylinder, r.ball)).collect();
        Err(CliError::Scan(format!("no witness for (cylinder/ball) {}", list.join(" "))))
    }
}

/// Data lines of a CSV table, split on commas.
fn csv_rows(text: &str) -> impl Iterator<Item = Vec<&str>> {
    text.lines().skip(1).filter(|l| !l.starts_with('#') && !l.is_empty()).map(|l| l.split(',').collect())
}

fn field<'a>(row: &[&'a str], i: usize, file: &str) -> Result<&'a str, CliError> {
    row.get(i).copied().ok_or_else(|| CliError::Artifact(format!("{file}: short row {}", row.join(","))))
}

fn parse_usize(s: &str, file: &str) -> Result<usize, CliError> {
    s.parse().map_err(|_| CliError::Artifact(format!("{file}: bad index {s:?}")))
}

/// Re-checks every artifact found in the output directory against a fresh
/// computation; returns the number of checked values.
pub fn verify(ctx: &Context) -> Result<(), CliError> {
    let dir = &ctx.out_dir;
    let path = |name: &str| dir.join(name);
    let mut checked = 0usize;
    let mut theorem1_point: Option<UniversalPoint> = None;

    if path("schedule.json").exists() {
        let mut up = load_schedule(&path("schedule.json"))?;
        let rebuilt = up.point.clone();
        if path("point.json").exists() {
            up.point = load_point(&path("point.json"))?;
        }
        check_shadowing(&up, ctx.config.shadow_samples, ctx.config.seed)?;
        if up.point != rebuilt {
            return Err(CliError::Bound("point.json differs from the point its schedule describes".into()));
        }
        println!("schedule.json: {} stages rebuilt and checked", up.schedule.stages.len());
        checked += up.schedule.stages.len();
        theorem1_point = Some(up);
    }

    let depth = ctx.config.depth;
    if path("convergence.csv").exists() || path("density.csv").exists() {
        let (net, _) = ctx.net()?;
        let up = match theorem1_point {
            Some(up) => up,
            None => ctx.universal_point(&ctx.targets(&net))?,
        };
        if path("convergence.csv").exists() {
            let text = read(&path("convergence.csv"))?;
            for row in csv_rows(&text) {
                let n = parse_usize(field(&row, 0, "convergence.csv")?, "convergence.csv")?;
                let rho = convergence_rho(&up, n, depth)?;
                if fmt(&rho) != field(&row, 3, "convergence.csv")? {
                    return Err(CliError::Bound(format!("convergence.csv: stage {n} has rho {}", fmt(&rho))));
                }
                checked += 1;
            }
            println!("convergence.csv: every rho reproduced");
        }
        if path("density.csv").exists() {
            let text = read(&path("density.csv"))?;
            if text != density_table(&up, &net, depth)? {
                return Err(CliError::Bound("density.csv does not match a fresh computation".into()));
            }
            checked += 1;
            println!("density.csv: reproduced");
        }
    }

    if path("scan.csv").exists() {
        checked += verify_scan(ctx, &read(&path("scan.csv"))?)?;
        println!("scan.csv: every rho reproduced");
    }

    let mut certificates: Vec<PathBuf> = std::fs::read_dir(dir)
        .map(|rd| rd.filter_map(|e| e.ok().map(|e| e.path())).collect())
        .unwrap_or_default();
    certificates.retain(|p| {
        p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("certificate_") && n.ends_with(".json"))
    });
    certificates.sort();
    if !certificates.is_empty() {
        let cocycles = ctx.cocycles()?;
        let (net, _) = ctx.net()?;
        let targets = ctx.targets(&net);
        for p in certificates {
            let file = p.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
            let name = &file["certificate_".len()..file.len() - ".json".len()];
            let (_, c) = cocycles
                .iter()
                .find(|(n, _)| n == name)
                .ok_or_else(|| CliError::Artifact(format!("{file}: no cocycle named {name:?} in the config")))?;
            let fresh = certificate_json(&theorem2_report(ctx, name, c, &targets, false)?);
            if fresh != read(&p)? {
                return Err(CliError::Inconsistent(format!("{file} does not match a fresh computation")));
            }
            checked += 1;
            println!("{file}: reproduced");
        }
    }

    if path(MANIFEST_FILE).exists() {
        let manifest = RunManifest::load(dir)?;
        for (command, run) in &manifest.runs {
            for o in &run.outputs {
                let Ok(bytes) = std::fs::read(path(&o.file)) else { continue };
                if sha256_hex(&bytes) != o.sha256 {
                    return Err(CliError::Artifact(format!("{} changed since `{command}` wrote it", o.file)));
                }
                checked += 1;
            }
        }
    }
    if checked == 0 {
        return Err(CliError::Artifact(format!("nothing to verify in {}", dir.display())));
    }
    println!("verified {checked} items");
    Ok(())
}

/// Rebuilds the witness points and recomputes each row of a scan table.
fn verify_scan(ctx: &Context, text: &str) -> Result<usize, CliError> {
    let file = "scan.csv";
    let (net, _) = ctx.net()?;
    let system = ctx.ball_system(&net)?;
    let targets = ctx.targets(&net);
    let depth = system.depth;
    let mut current: Option<(Word, UniversalPoint)> = None;
    let mut checked = 0;
    for row in csv_rows(text) {
        let cylinder: Word = field(&row, 0, file)?.parse().map_err(|e: symdyn::Error| CliError::Artifact(e.to_string()))?;
        if current.as_ref().is_none_or(|(w, _)| *w != cylinder) {
            let up = density_witness(&cylinder, &targets, ctx.resolved.growth.as_deref(), &ctx.sft)?;
            current = Some((cylinder.clone(), up));
        }
        let (_, up) = current.as_ref().expect("set above");
        let b = parse_usize(field(&row, 1, file)?, file)?;
        let ball = &system
            .pairs
            .get(b)
            .ok_or_else(|| CliError::Artifact(format!("{file}: no ball {b}")))?
            .v;
        let claimed = field(&row, 3, file)?;
        let mismatch = |what: &str| CliError::Scan(format!("{file}: cylinder {cylinder} ball {b}: {what}"));
        match field(&row, 2, file)? {
            "absent" => {
                if pu_membership(&up.point, ball, &up.checkpoints, depth)?.is_some() {
                    return Err(mismatch("listed absent but a checkpoint enters the ball"));
                }
            }
            h => {
                let n: BigInt = h.parse().map_err(|_| CliError::Artifact(format!("{file}: bad horizon {h:?}")))?;
                let e = empirical_measure(&up.point, &n, depth)?;
                let d = ball.distance(&e.marginals, depth)?;
                if fmt(&d) != claimed || d > ball.radius {
                    return Err(mismatch(&format!("recomputed rho {}", fmt(&d))));
                }
            }
        }
        checked += 1;
    }
    Ok(checked)
}
