use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde::Serialize;
use singular_yamabe::asymptotics::{
    compare_prediction, fit_exponent, growth_condition_holds, positivity_audit, predicted_exponent,
    space_admissibility, ExpansionFit, PositivityAudit, PredictionReport,
};
use singular_yamabe::certifier::{
    hardy_check, log_radii, moser_supbound, morrey_check, random_truncation_audit, sobolev_constants, HardyReport,
    MoserLadder, MorreyCenter, MorreyVerdict, SobolevEstimate, TruncationAudit,
};
use singular_yamabe::geometry::{admissibility as classify_strata, Tip};
use singular_yamabe::grid::{GridSpec, RadialGrid};
use singular_yamabe::io::{
    fmt_f64, parse_space, parse_strata, read_solution_csv, write_atomic, write_continuation_csv, write_fit_csv,
    write_solution_csv, write_spectrum_csv, FitRow, LinkSection, SpaceFile,
};
use singular_yamabe::solver::{assemble, continuation, residual};
use singular_yamabe::spectrum::{conic_indicial_roots, family_spectrum, positivity_check};
use singular_yamabe::{Error, Result, YamabeConstants};

use crate::config::{RunConfig, RunManifest};

pub struct Context {
    pub out: PathBuf,
    pub config: RunConfig,
}

impl Context {
    fn write(&self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.out.join(name), bytes)
    }

    fn write_toml<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let text = toml::to_string(value).map_err(|e| Error::Parse(format!("{name}: {e}")))?;
        self.write(name, text.as_bytes())
    }

    fn manifest(&self, command: &str, inputs: &[&Path]) -> Result<()> {
        let m = RunManifest {
            command: command.to_string(),
            inputs: inputs.iter().map(|p| p.to_path_buf()).collect(),
            out: self.out.clone(),
            seed: self.config.probes.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: self.config.clone(),
        };
        self.write("manifest.toml", m.to_toml()?.as_bytes())
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn load_space(path: &Path) -> Result<(SpaceFile, singular_yamabe::geometry::ConeSpace)> {
    parse_space(&read(path)?).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

#[derive(Serialize)]
struct SpectrumReport {
    n: usize,
    m: usize,
    modes: usize,
    lambda0: f64,
    threshold: f64,
    positivity: String,
    strictly_positive: bool,
}

pub fn spectrum(ctx: &Context, path: &Path, m: Option<usize>, jmax: Option<usize>) -> Result<ExitCode> {
    ctx.manifest("spectrum", &[path])?;
    let (mut file, _) = load_space(path)?;
    if let Some(j) = jmax {
        match &mut file.link {
            LinkSection::RoundSphere { j_max, .. } | LinkSection::FlatTorus { j_max, .. } => *j_max = j,
            LinkSection::Explicit { spectrum, .. } => spectrum.truncate(j + 1),
        }
    }
    let space = file.build()?;
    let n = space.n();
    let m = m.unwrap_or(n);
    let table = family_spectrum(&space.link, m)?;
    let conic = family_spectrum(&space.link, n)?;
    let pos = positivity_check(&conic, &space.constants, space.f())?;
    let roots = conic_indicial_roots(&conic)?;
    ctx.write("spectrum.csv", &csv_bytes(|b| write_spectrum_csv(b, &table, &roots))?)?;
    ctx.write_toml(
        "spectrum_report.toml",
        &SpectrumReport {
            n,
            m,
            modes: table.entries.len(),
            lambda0: pos.lambda0,
            threshold: pos.threshold,
            positivity: pos.classification.to_string(),
            strictly_positive: pos.strictly_positive,
        },
    )?;
    println!("spectrum: {} modes of L^{m}, lowest conic root pair {:?}", table.entries.len(), roots.roots.first());
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SolveReport {
    n: usize,
    cells: usize,
    stages: usize,
    complete: bool,
    /// Extrapolated to `p = n`; a radial upper bound for `Y`.
    y_extrapolated: Option<f64>,
    y_closest_stage: Option<f64>,
    label: &'static str,
    multiplier_convention: &'static str,
    failure: Option<String>,
}

pub fn solve(ctx: &Context, path: &Path) -> Result<ExitCode> {
    ctx.manifest("solve", &[path])?;
    let (_, space) = load_space(path)?;
    let cfg = &ctx.config.solver;
    cfg.validate()?;
    cfg.schedule_for(space.n())?;
    let grid = RadialGrid::graded(&space, &cfg.grid)?;
    let a = assemble(&space, &grid)?;
    let result = continuation(&a, cfg)?;
    for (k, s) in result.stages.iter().enumerate() {
        let bytes = csv_bytes(|b| write_solution_csv(b, &grid.nodes, s.u.values(), s.p, s.y_p))?;
        ctx.write(&format!("stages/solution_{k:02}.csv"), &bytes)?;
        if k + 1 == result.stages.len() {
            ctx.write("solution.csv", &bytes)?;
        }
    }
    ctx.write("continuation.csv", &csv_bytes(|b| write_continuation_csv(b, &result))?)?;
    ctx.write_toml(
        "solve_report.toml",
        &SolveReport {
            n: space.n(),
            cells: grid.len(),
            stages: result.stages.len(),
            complete: result.is_complete(),
            y_extrapolated: result.extrapolated,
            y_closest_stage: result.last().map(|s| s.y_p),
            label: "radial upper bound",
            multiplier_convention: "Lambda = Y_p (the multiplier of u^{(p+2)/(p-2)})",
            failure: result.failure.as_ref().map(|f| format!("p = {}: {}", f.p, f.error)),
        },
    )?;
    match &result.failure {
        Some(f) => {
            eprintln!("error: stage p = {} failed: {}; {} stages written", f.p, f.error, result.stages.len());
            Ok(ExitCode::from(3))
        }
        None => {
            println!(
                "solve: {} stages, Y extrapolated = {}",
                result.stages.len(),
                result.extrapolated.map_or("n/a".to_string(), fmt_f64)
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

#[derive(Serialize)]
struct TipReport {
    fit: ExpansionFit,
    comparison: PredictionReport,
    growth_condition: bool,
}

#[derive(Serialize)]
struct AnalyzeReport {
    p: f64,
    y_p: f64,
    residual: f64,
    tips: Vec<TipReport>,
    positivity: PositivityAudit,
    sobolev: SobolevEstimate,
    moser: MoserLadder,
    moser_potential_admissible: bool,
}

pub fn analyze(ctx: &Context, solution: &Path, path: &Path) -> Result<ExitCode> {
    ctx.manifest("analyze", &[solution, path])?;
    let (_, space) = load_space(path)?;
    let table = read_solution_csv(std::fs::File::open(solution)?)?;
    let n = space.n();
    if !(table.p > n as f64) {
        return Err(Error::Refused(format!("solution exponent p = {} is not above n = {n}", table.p)));
    }
    let grid = RadialGrid::from_nodes(&space, &table.x)?;
    let u = table.u;
    if u.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::Refused("solution has negative or non-finite values".into()));
    }
    let s = YamabeConstants::subcritical_exponent(table.p);
    let norm = grid.norm(&u, s);
    if (norm - 1.0).abs() > ctx.config.analysis.normalization_tol {
        return Err(Error::Refused(format!("solution is not normalized: |u|_{s} = {norm}")));
    }
    let a = assemble(&space, &grid)?;
    let res = residual(&u, table.p, table.y_p, &a);

    let mut tips = Vec::new();
    for tip in space.warp.tips() {
        let fit = fit_exponent(&u, &grid, tip, None)?;
        let predicted = predicted_exponent(&space, tip)?;
        let comparison = compare_prediction(&fit, predicted, Some(ctx.config.analysis.match_threshold));
        let growth_condition = growth_condition_holds(&fit, n);
        tips.push(TipReport {
            fit,
            comparison,
            growth_condition,
        });
    }
    let (_, adm) = space_admissibility(&space, grid.min_step())?;
    let positivity = positivity_audit(&u, &adm);
    let sobolev = sobolev_constants(&a, &ctx.config.probes)?;
    let v: Vec<f64> = a
        .potential
        .iter()
        .zip(&u)
        .map(|(pot, x)| table.y_p * x.powf(s - 2.0) - pot)
        .collect();
    let q = if ctx.config.analysis.moser_q > 0.0 {
        ctx.config.analysis.moser_q
    } else {
        n as f64
    };
    let moser = moser_supbound(&u, &v, q, &sobolev, &grid, &space.constants, ctx.config.analysis.moser_levels)?;

    let rows: Vec<FitRow<'_>> = tips
        .iter()
        .map(|t| FitRow {
            fit: &t.fit,
            report: &t.comparison,
        })
        .collect();
    ctx.write("fits.csv", &csv_bytes(|b| write_fit_csv(b, &rows))?)?;
    for t in &tips {
        println!(
            "tip {}: gamma_hat = {:.6}, predicted = {:.6}, match = {}",
            t.fit.tip.label(),
            t.fit.gamma_hat,
            t.comparison.predicted,
            t.comparison.matches
        );
    }
    println!("moser: sup bound {} vs max u {} ({})", fmt_f64(moser.sup_bound), fmt_f64(moser.discrete_max), if moser.validated { "valid" } else { "NOT valid" });
    ctx.write_toml(
        "analyze_report.toml",
        &AnalyzeReport {
            p: table.p,
            y_p: table.y_p,
            residual: res,
            tips,
            positivity,
            sobolev,
            moser,
            // a nonzero x⁻² coefficient keeps V out of L^q for q > n/2
            moser_potential_admissible: adm.iv_a || adm.iv_b,
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct StratumRow {
    n: usize,
    f: usize,
    a0: f64,
    a1: f64,
    ell: usize,
    low_codimension: bool,
}

#[derive(Serialize)]
struct AdmissibilityReport {
    strata: usize,
    smooth: bool,
    iv_a: bool,
    iv_b: bool,
    iv_b_alpha: f64,
    iv_c: bool,
    positivity_guaranteed: bool,
    stratum: Vec<StratumRow>,
}

pub fn admissibility(ctx: &Context, path: &Path) -> Result<ExitCode> {
    ctx.manifest("admissibility", &[path])?;
    let file = parse_strata(&read(path)?).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })?;
    let adm = classify_strata(&file.stratum);
    let report = AdmissibilityReport {
        strata: file.stratum.len(),
        smooth: file.stratum.is_empty(),
        iv_a: adm.iv_a,
        iv_b: adm.iv_b,
        iv_b_alpha: adm.iv_b_alpha,
        iv_c: adm.iv_c,
        positivity_guaranteed: adm.positivity_guaranteed(),
        stratum: file
            .stratum
            .iter()
            .map(|s| StratumRow {
                n: s.n,
                f: s.f,
                a0: s.a0,
                a1: s.a1,
                ell: s.ell(),
                low_codimension: s.low_codimension(),
            })
            .collect(),
    };
    ctx.write_toml("admissibility_report.toml", &report)?;
    println!("{adm}");
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct MorreyRow {
    alpha: f64,
    q: f64,
    sup_constant: f64,
    small_radius_slope: f64,
    verdict: MorreyVerdict,
}

#[derive(Serialize)]
struct InequalityReport {
    hardy: HardyReport,
    morrey: Vec<MorreyRow>,
    sobolev: SobolevEstimate,
    truncation: TruncationAudit,
}

pub fn inequalities(ctx: &Context, path: &Path) -> Result<ExitCode> {
    ctx.manifest("inequalities", &[path])?;
    let (_, space) = load_space(path)?;
    let ic = &ctx.config.inequalities;
    let seed = ctx.config.probes.seed;
    let exec = ctx.config.probes.execution;
    let hardy = hardy_check(
        space.f(),
        space.length(),
        &GridSpec::new(ic.hardy_cells, ic.hardy_ratio, ic.hardy_depth),
        ic.hardy_probes,
        seed,
        exec,
    )?;

    let grid = RadialGrid::graded(&space, &ctx.config.solver.grid)?;
    let a = assemble(&space, &grid)?;
    let length = space.length();
    let lo = (10.0 * grid.faces[1]).max(1e-4 * length);
    let radii = log_radii(lo, 0.25 * length, ic.morrey_radii);
    let mut centers: Vec<MorreyCenter> = space.warp.tips().into_iter().map(MorreyCenter::Tip).collect();
    centers.push(MorreyCenter::Interior(0.5 * length));
    let mut morrey = Vec::new();
    let mut morrey_csv = csv_writer_header()?;
    for &alpha in &ic.morrey_alphas {
        let r = morrey_check(&space, &grid, &a.potential, ic.morrey_q, alpha, &centers, &radii)?;
        for s in &r.samples {
            let center = match s.center {
                MorreyCenter::Tip(Tip::Start) => "tip_0".to_string(),
                MorreyCenter::Tip(Tip::End) => "tip_L".to_string(),
                MorreyCenter::Interior(x) => format!("x={}", fmt_f64(x)),
            };
            morrey_csv.push_str(&format!("{},{},{},{}\n", fmt_f64(alpha), center, fmt_f64(s.radius), fmt_f64(s.value)));
        }
        println!("morrey alpha = {alpha}: {:?}", r.verdict);
        morrey.push(MorreyRow {
            alpha,
            q: r.q,
            sup_constant: r.sup_constant,
            small_radius_slope: r.small_radius_slope,
            verdict: r.verdict,
        });
    }
    let sobolev = sobolev_constants(&a, &ctx.config.probes)?;
    let truncation = random_truncation_audit(seed, ic.truncation_draws)?;
    println!(
        "hardy ratio {:?}, sobolev A = {}, B = {}, truncation failures {}",
        hardy.ratio,
        fmt_f64(sobolev.a),
        fmt_f64(sobolev.b),
        truncation.failures
    );
    ctx.write("morrey.csv", morrey_csv.as_bytes())?;
    ctx.write_toml(
        "inequalities_report.toml",
        &InequalityReport {
            hardy,
            morrey,
            sobolev,
            truncation,
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

fn csv_writer_header() -> Result<String> {
    Ok("alpha,center,radius,value\n".to_string())
}
