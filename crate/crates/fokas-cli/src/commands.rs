//! One function per subcommand. Each returns a report and whether any
//! invariant check failed; errors carry their own exit-code class.

use std::path::{Path, PathBuf};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use fokas_core::contour::{build_contour, ray_of, LAMBDA2_RAYS};
use fokas_core::data::{BoundaryData, InitialData, ZeroInitial};
use fokas_core::formats::{field_to_string, profile_to_string, table_to_string};
use fokas_core::pipeline::{
    checks_report, determinant_suite, family_for, hermitian_checks, j4_check, jump_symmetry_checks, monodromy_check,
    parity_suite, relation_checks, solve_grid, spectral_table, unitarity_check, Check,
};
use fokas_core::rhp::SolverOptions;
use fokas_core::spectral::{derive_alpha_beta, residue_data, zero_set, LiveSpectral, ResidueData, RhpFamily, SampleLabel, SpectralTable, Zero, ZeroOptions};
use fokas_core::{
    compatibility_check, evolve, extract_traces, manufactured_study, oracle_ab_piecewise_constant, read_field, read_profile,
    read_table, write_atomic, Axis, BoundaryProfiles, Error, Manufactured, Profile, Report, Result, SampledBoundary,
    SampledInitial, StepData, Traces, C64,
};

use crate::config::RunConfig;
use crate::residues;

/// What a command produced.
pub struct Outcome {
    pub report: Report,
    pub failed: bool,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Self { report, failed: false }
    }
}

/// Points past these are outside the regime the solver was validated in.
pub const X_ENVELOPE: f64 = 5.0;
pub const Y_ENVELOPE: f64 = 1.0;
pub const ORACLE_CHECK_TOL: f64 = 1e-6;

fn out_path(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.out_dir.join(name)
}

fn write(r: &mut Report, key: &str, path: &Path, contents: &str) -> Result<()> {
    write_atomic(path, contents)?;
    r.push(key, path.display());
    Ok(())
}

fn profile_on(path: &Path, axis: Axis) -> Result<Profile> {
    let p = read_profile(path)?;
    if p.axis != axis {
        return Err(Error::Validation(format!("{} holds a {}-profile, expected {}", path.display(), p.axis.tag(), axis.tag())));
    }
    Ok(p)
}

fn boundary_profiles(paths: &[PathBuf]) -> Result<BoundaryProfiles> {
    let [g0, g1, g2] = paths else {
        return Err(Error::Validation(format!("need three boundary profiles g0 g1 g2, got {}", paths.len())));
    };
    BoundaryProfiles::new(profile_on(g0, Axis::Y)?, profile_on(g1, Axis::Y)?, profile_on(g2, Axis::Y)?)
}

fn lambdas(table: &SpectralTable) -> Vec<C64> {
    table.records.iter().map(|r| r.lambda).collect()
}

/// max |f - target| over the outermost sample of every ray.
fn outer_decay(table: &SpectralTable, f: impl Fn(&fokas_core::spectral::SpectralRecord) -> Option<C64>) -> f64 {
    let r_max = table.records.iter().map(|r| r.lambda.norm()).fold(0.0, f64::max);
    table
        .records
        .iter()
        .filter(|r| matches!(r.label, SampleLabel::Ray(_)) && (r.lambda.norm() - r_max).abs() < 1e-12 * r_max)
        .filter_map(f)
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Parity and determinant checks plus decay at the truncation radius.
fn table_summary(table: &SpectralTable) -> Result<Report> {
    let contour = build_contour(table.meta.radius, table.meta.nodes_per_ray)?;
    let mut checks = parity_suite(table, &lambdas(table))?;
    checks.extend(determinant_suite(table, &contour, 0.0, 0.0)?);
    let mut r = checks_report(&checks);
    r.push("records", table.records.len());
    if table.records.iter().any(|x| x.a.is_some()) {
        r.num("decay.a_minus_1", outer_decay(table, |x| x.a.map(|a| a - 1.0)));
        r.num("decay.b", outer_decay(table, |x| x.b));
    }
    if table.records.iter().any(|x| x.big_a.is_some()) {
        r.num("decay.A_minus_1", outer_decay(table, |x| x.big_a.map(|a| a - 1.0)));
        r.num("decay.B", outer_decay(table, |x| x.big_b));
    }
    Ok(r)
}

/// Reads a sampled profile as piecewise-constant data: each run of equal
/// samples becomes one step.
pub fn step_data(p: &Profile) -> Result<StepData> {
    let (h, n, end) = (p.step, p.len(), p.extent());
    let mut steps = Vec::new();
    let mut i = 0;
    while i < n {
        let v = p.samples[i];
        let mut j = i + 1;
        while j < n && p.samples[j] == v {
            j += 1;
        }
        let (a, b) = (i as f64 * h, (j as f64 * h).min(end));
        if v != C64::default() && b > a {
            steps.push((a, b, v));
        }
        i = j;
    }
    StepData::new(steps, end)
}

pub fn scatter(cfg: &RunConfig, u0: &Path, oracle_check: bool, output: Option<&Path>) -> Result<Outcome> {
    let profile = profile_on(u0, Axis::X)?;
    profile.check_decay()?;
    let opts = cfg.integrator();
    let mut r = cfg.report();
    r.push("command", "scatter").push("input", u0.display());
    let (table, failed) = if oracle_check {
        let steps = step_data(&profile)?;
        let table = spectral_table(Some(&steps as &dyn InitialData), None, cfg.truncation_radius, cfg.nodes_per_ray, &opts)?;
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for rec in &table.records {
            if let (Some(a), Some(b)) = (rec.a, rec.b) {
                let (ea, eb) = oracle_ab_piecewise_constant(&steps, rec.lambda);
                worst = worst.max(((a - ea).norm() + (b - eb).norm()) / ea.norm().max(1.0));
                count += 1;
            }
        }
        let check = Check::at_most("oracle_check.ab", worst, ORACLE_CHECK_TOL, count);
        check.report_into(&mut r);
        r.push("oracle_check.steps", steps.steps().len());
        (table, !check.pass())
    } else {
        let data = SampledInitial::new(&profile);
        (spectral_table(Some(&data as &dyn InitialData), None, cfg.truncation_radius, cfg.nodes_per_ray, &opts)?, false)
    };
    let path = output.map_or_else(|| out_path(cfg, "spectral_x.table"), Path::to_path_buf);
    write(&mut r, "output", &path, &table_to_string(&table))?;
    r.extend(&table_summary(&table)?);
    Ok(Outcome { report: r, failed })
}

pub fn boundary_scatter(cfg: &RunConfig, g: &[PathBuf], output: Option<&Path>) -> Result<Outcome> {
    let profiles = boundary_profiles(g)?;
    let data = SampledBoundary::new(&profiles);
    let mut r = cfg.report();
    r.push("command", "boundary-scatter");
    r.push("L", data.length());
    let table = spectral_table(None, Some(&data as &dyn BoundaryData), cfg.truncation_radius, cfg.nodes_per_ray, &cfg.integrator())?;
    let path = output.map_or_else(|| out_path(cfg, "spectral_y.table"), Path::to_path_buf);
    write(&mut r, "output", &path, &table_to_string(&table))?;
    r.extend(&table_summary(&table)?);
    Ok(Outcome::ok(r))
}

fn load_tables(paths: &[PathBuf]) -> Result<SpectralTable> {
    match paths {
        [one] => read_table(one),
        [p, q] => read_table(p)?.merge(&read_table(q)?),
        _ => Err(Error::Validation(format!("expected one or two spectral tables, got {}", paths.len()))),
    }
}

/// Seeded lambdas on the tabulated radial lines at uniform random radii.
fn random_lambdas(table: &SpectralTable, seed: u64, count: usize) -> Vec<C64> {
    let radii: Vec<f64> = table.records.iter().map(|r| r.lambda.norm()).collect();
    let (lo, hi) = (radii.iter().copied().fold(f64::INFINITY, f64::min), radii.iter().copied().fold(0.0, f64::max));
    if table.records.is_empty() || !(hi > lo) {
        return Vec::new();
    }
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let l = table.records[rng.random_range(0..table.records.len())].lambda;
            l / l.norm() * rng.random_range(lo..hi)
        })
        .collect()
}

pub fn validate(cfg: &RunConfig, paths: &[PathBuf]) -> Result<Outcome> {
    let table = load_tables(paths)?;
    let contour = build_contour(table.meta.radius, table.meta.nodes_per_ray)?;
    let all = lambdas(&table);
    let mut r = cfg.report();
    r.push("command", "validate");
    let mut checks = parity_suite(&table, &all)?;
    let random = random_lambdas(&table, cfg.seed, cfg.random_samples);
    for mut c in parity_suite(&table, &random)? {
        c.name = c.name.replacen("parity.", "parity_random.", 1);
        checks.push(c);
    }
    checks.extend(determinant_suite(&table, &contour, 0.0, 0.0)?);
    let real_l2: Vec<C64> = all.iter().copied().filter(|&l| ray_of(l).is_some_and(|k| LAMBDA2_RAYS.contains(&k))).collect();
    checks.extend(unitarity_check(&table, &real_l2)?);
    let kappas: Vec<f64> = all.iter().filter(|&&l| ray_of(l) == Some(3)).map(|l| l.norm()).collect();
    checks.extend(hermitian_checks(&table, &kappas, 0.0, 0.0)?);
    checks.extend(jump_symmetry_checks(&table, &contour, 0.0, 0.0)?);
    let r_min = all.iter().map(|l| l.norm()).fold(f64::INFINITY, f64::min);
    checks.extend(monodromy_check(&table, 0.0, 0.0, r_min)?);
    r.num("monodromy_radius", r_min);
    checks.extend(j4_check(&table, &all, 0.0, 0.0)?);
    let both = table.records.iter().any(|x| x.a.is_some()) && table.records.iter().any(|x| x.big_a.is_some());
    if both {
        let mut radii: Vec<f64> = cfg.relation_radii.iter().copied().filter(|&x| x <= table.meta.radius).collect();
        if radii.len() < 2 {
            radii = vec![table.meta.radius / 4.0, table.meta.radius / 2.0, table.meta.radius];
        }
        let rel = relation_checks(&table, &radii)?;
        r.push("global_relation.radii", radii.iter().map(f64::to_string).collect::<Vec<_>>().join(","));
        r.num("global_relation.interior_residual", rel.interior_residual);
        checks.push(rel.growth);
        checks.push(rel.outer);
        if let Some(m) = derive_alpha_beta(&table).max_s3_mismatch() {
            r.num("derived.s3_mismatch", m);
        }
    }
    let summary = checks_report(&checks);
    let failed = checks.iter().any(|c| !c.pass());
    r.extend(&summary);
    r.push("status", if failed { "fail" } else { "pass" });
    Ok(Outcome { report: r, failed })
}

fn push_zeros(r: &mut Report, name: &str, zs: &[Zero]) {
    r.push(format!("zeros.{name}.count"), zs.len());
    for (i, z) in zs.iter().enumerate() {
        r.complex(format!("zeros.{name}.{i}"), z.location);
    }
}

pub fn zeros(cfg: &RunConfig, initial: Option<&Path>, boundary: &[PathBuf]) -> Result<Outcome> {
    if initial.is_none() && boundary.is_empty() {
        return Err(Error::Validation("zeros needs --initial and/or --boundary".into()));
    }
    let init = initial.map(|p| profile_on(p, Axis::X).map(|p| SampledInitial::new(&p))).transpose()?;
    let bdry = if boundary.is_empty() { None } else { Some(SampledBoundary::new(&boundary_profiles(boundary)?)) };
    let zero = ZeroInitial { x_max: 1.0 };
    let src = LiveSpectral {
        initial: init.as_ref().map_or(&zero as &dyn InitialData, |d| d as &dyn InitialData),
        boundary: bdry.as_ref().map(|g| g as &dyn BoundaryData),
        opts: cfg.integrator(),
    };
    let set = zero_set(&src, cfg.zero_radius, &ZeroOptions::default())?;
    let family = match (init.is_some(), bdry.is_some()) {
        (true, false) => RhpFamily::X,
        (false, true) => RhpFamily::Y,
        _ => RhpFamily::Principal,
    };
    let res = residue_data(&set, &src, family)?;
    let mut r = cfg.report();
    r.push("command", "zeros").push("radius", cfg.zero_radius).push("family", family.name());
    push_zeros(&mut r, "a_upper", &set.a_upper);
    push_zeros(&mut r, "a_lower", &set.a_lower);
    push_zeros(&mut r, "alpha_upper", &set.alpha_upper);
    push_zeros(&mut r, "alpha_lower", &set.alpha_lower);
    push_zeros(&mut r, "A", &set.big_a);
    r.push("zero_free", set.is_empty());
    r.push("poles", res.poles.len());
    write(&mut r, "residues", &out_path(cfg, "residues.txt"), &residues::to_string(&res))?;
    Ok(Outcome::ok(r))
}

pub struct SolveGrid {
    pub hx: f64,
    pub nx: usize,
    pub hy: f64,
    pub ny: usize,
}

pub fn solve(cfg: &RunConfig, paths: &[PathBuf], grid: &SolveGrid, fixture: Option<&Path>) -> Result<Outcome> {
    let table = load_tables(paths)?;
    let family = family_for(&table)?;
    let res = fixture.map(residues::read).transpose()?.unwrap_or_else(ResidueData::default);
    let mut r = cfg.report();
    r.push("command", "solve").push("family", family.name()).push("poles", res.poles.len());
    let x_far = grid.nx.saturating_sub(1) as f64 * grid.hx;
    let y_far = grid.ny.saturating_sub(1) as f64 * grid.hy;
    let mut warnings = Vec::new();
    if x_far > X_ENVELOPE {
        warnings.push(format!("x up to {x_far} exceeds {X_ENVELOPE}; expect degraded accuracy from the oscillatory jumps"));
    }
    if y_far > Y_ENVELOPE {
        warnings.push(format!("y up to {y_far} exceeds {Y_ENVELOPE}; expect degraded accuracy from the oscillatory jumps"));
    }
    for (i, w) in warnings.iter().enumerate() {
        eprintln!("warning: {w}");
        r.push(format!("warning.{i}"), w);
    }
    let opts = SolverOptions {
        residual_tol: cfg.residual_tol,
        ..SolverOptions::default()
    };
    let g = solve_grid(&table, family, (grid.hx, grid.nx), (grid.hy, grid.ny), &res, &opts)?;
    let worst = |f: fn(&fokas_core::pipeline::PointSolve) -> f64| g.points.iter().map(f).fold(0.0, f64::max);
    r.push("points", g.points.len());
    r.num("max_residual", worst(|p| p.residual));
    r.num("max_det_drift", worst(|p| p.det_drift));
    r.num("max_condition", worst(|p| p.condition));
    r.num("max_normalization", worst(|p| p.normalization));
    r.push("reconstruction_iterations", g.iterations);
    r.num("max_abs_u", g.u.max_abs());
    write(&mut r, "m_field", &out_path(cfg, "m.field"), &field_to_string(&g.m))?;
    write(&mut r, "u_field", &out_path(cfg, "u.field"), &field_to_string(&g.u))?;
    Ok(Outcome::ok(r))
}

fn write_traces(cfg: &RunConfig, r: &mut Report, t: &Traces) -> Result<()> {
    for (name, p) in [("u0", &t.u0), ("g0", &t.g0), ("g1", &t.g1), ("g2", &t.g2), ("h_L", &t.h_l)] {
        write(r, &format!("trace.{name}"), &out_path(cfg, &format!("{name}.profile")), &profile_to_string(p))?;
    }
    let c = compatibility_check(&t.u0, &t.g0, &t.g1, &t.g2)?;
    r.num("corner.value", c.value)
        .num("corner.slope", c.slope)
        .num("corner.curvature", c.curvature)
        .num("corner.y_rate", c.y_rate)
        .num("corner.max", c.max());
    Ok(())
}

pub fn oracle(cfg: &RunConfig, u0: &Path) -> Result<Outcome> {
    let profile = profile_on(u0, Axis::X)?;
    let amp = profile.max_abs();
    if amp > cfg.amplitude_guard {
        return Err(Error::Validation(format!(
            "max |u0| = {amp} exceeds amplitude_guard = {}",
            cfg.amplitude_guard
        )));
    }
    let run = evolve(&profile, cfg.length, &cfg.oracle())?;
    let mut r = cfg.report();
    r.push("command", "oracle").push("input", u0.display());
    r.push("steps", run.steps)
        .num("max_abs_u0", amp)
        .num("l2_drift", run.l2_drift)
        .num("growth", run.growth)
        .num("corner_amplitude", run.corner_amplitude);
    write(&mut r, "field", &out_path(cfg, "oracle.field"), &field_to_string(&run.field))?;
    write_traces(cfg, &mut r, &extract_traces(&run.field)?)?;
    Ok(Outcome::ok(r))
}

pub fn oracle_manufactured(cfg: &RunConfig, levels: usize) -> Result<Outcome> {
    if levels < 2 {
        return Err(Error::Validation("a convergence table needs at least 2 levels".into()));
    }
    let m = Manufactured::default();
    let study = manufactured_study(&cfg.oracle(), cfg.length, &m, levels)?;
    let mut r = cfg.report();
    r.push("command", "oracle-manufactured").push("levels", levels);
    let mut table = String::from("# hx hy max_error ratio\n");
    for (i, l) in study.iter().enumerate() {
        r.num(format!("level.{i}.hx"), l.hx).num(format!("level.{i}.hy"), l.hy).num(format!("level.{i}.error"), l.error);
        let ratio = l.ratio.map_or_else(|| "-".to_string(), |q| format!("{q:.3}"));
        if let Some(q) = l.ratio {
            r.num(format!("level.{i}.ratio"), q);
        }
        table.push_str(&format!("{:.6e} {:.6e} {:.6e} {ratio}\n", l.hx, l.hy, l.error));
    }
    write(&mut r, "table", &out_path(cfg, "manufactured.table"), &table)?;
    Ok(Outcome::ok(r))
}

pub fn traces(cfg: &RunConfig, field: &Path) -> Result<Outcome> {
    let f = read_field(field)?;
    let mut r = cfg.report();
    r.push("command", "traces").push("input", field.display());
    write_traces(cfg, &mut r, &extract_traces(&f)?)?;
    Ok(Outcome::ok(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_become_steps() {
        let v = [0.0, 0.0, 0.2, 0.2, 0.2, 0.0, -0.1, -0.1];
        let p = Profile::new(Axis::X, 0.5, v.iter().map(|&x| C64::new(x, 0.0)).collect()).unwrap();
        let s = step_data(&p).unwrap();
        assert_eq!(s.steps(), &[(1.0, 2.5, C64::new(0.2, 0.0)), (3.0, 3.5, C64::new(-0.1, 0.0))]);
    }

    #[test]
    fn random_lambdas_are_seeded() {
        let zero = ZeroInitial { x_max: 1.0 };
        let t = spectral_table(Some(&zero as &dyn InitialData), None, 2.0, 8, &Default::default()).unwrap();
        assert_eq!(random_lambdas(&t, 3, 10), random_lambdas(&t, 3, 10));
        assert_ne!(random_lambdas(&t, 3, 10), random_lambdas(&t, 4, 10));
    }
}
