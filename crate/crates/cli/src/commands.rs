//! One function per subcommand, each producing a `key: value` report.

use clap::ValueEnum;
use mixkt::gen::{random_matrix, rng, MassProfile};
use mixkt::interp::{bracket_u_p_with, op_triple_norm_with, theta_inf_norm_with, theta_q_norm, weak_type_check_with};
use mixkt::kt::{kt_bracket_refined, kt_bracket_with, kt_exact_lp_with, kt_mask_bruteforce_with};
use mixkt::rectnorm::{quad_norm_with, triple_norm_p1_direct, triple_norm_with};
use mixkt::repro::{run_case, CaseParams};
use mixkt::splitting::split_with;
use mixkt::{
    conjugate, lorentz_norm, lq_norm, mixed_inf_one, mixed_lorentz_norm, mixed_weak_norm, triple_norm_p1_degenerate,
    Couple, CoupleSpec, GridOptions, InterpSpec, KtSource, Limits, MeasureSpace, OperatorKernel, RectNormResult,
    WeightedMatrix,
};

use crate::error::CliError;
use crate::instance::{read_instance, InstanceFile};
use crate::report::{fmt_exponent, Report};
use crate::verify::{self, VerifyConfig};
use crate::{Cli, Command, CoupleArgs, InputArgs, InterpKind, Masses, NormKind, Oracle, RectKind, Source};

pub struct Outcome {
    pub text: String,
    pub ok: bool,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Self {
            text: report.render(),
            ok: true,
        }
    }
}

fn value_name(v: &impl ValueEnum) -> String {
    v.to_possible_value()
        .map_or_else(String::new, |p| p.get_name().to_string())
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn required(value: Option<f64>, flag: &str, kind: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| usage(format!("{kind} needs --{flag}")))
}

fn load(input: &InputArgs) -> Result<(InstanceFile, WeightedMatrix), CliError> {
    let file = read_instance(input.input.as_deref())?;
    let a = file.matrix()?;
    Ok((file, a))
}

fn spec_of(c: &CoupleArgs) -> Result<CoupleSpec, CliError> {
    Ok(CoupleSpec::new(c.p, c.q, c.t)?)
}

fn header(cli: &Cli, command: &str, file: Option<&InstanceFile>) -> Report {
    let mut r = Report::new(command, cli.seed, cli.digits as usize);
    if let Some(f) = file {
        if let Some(name) = &f.name {
            r.text("instance", name);
        }
        r.text("shape", format!("{}x{}", f.mu.len(), f.nu.len()));
    }
    r
}

fn couple_lines(r: &mut Report, spec: &CoupleSpec) {
    r.text("p", fmt_exponent(spec.p()));
    r.text("q", fmt_exponent(spec.q()));
    r.num("t", spec.t());
}

fn rect_lines(r: &mut Report, a: &WeightedMatrix, res: &RectNormResult) {
    r.num("value", res.value);
    r.rectangle("witness", &res.witness);
    r.num("witness_row_measure", res.witness.row_measure(a));
    r.num("witness_col_measure", res.witness.col_measure(a));
    r.text("regime", res.regime.as_str());
}

fn matrix_lines(r: &mut Report, key: &str, m: &WeightedMatrix) {
    for i in 0..m.nrows() {
        let cells: Vec<String> = m.row(i).iter().map(|&x| crate::report::fmt_num(x, 12)).collect();
        r.text(&format!("{key}[{i}]"), cells.join(" "));
    }
}

fn mask_lines(r: &mut Report, mask: &[bool], ncols: usize, yes: char, no: char) {
    for (i, row) in mask.chunks(ncols).enumerate() {
        let cells: Vec<String> = row.iter().map(|&x| if x { yes } else { no }.to_string()).collect();
        r.text(&format!("mask[{i}]"), cells.join(" "));
    }
}

fn limits(cli: &Cli) -> Limits {
    if cli.guard_override {
        Limits::unlimited()
    } else {
        Limits::default()
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let limits = limits(cli);
    match &cli.command {
        Command::Norm {
            kind,
            p,
            q,
            r,
            transpose,
            input,
        } => norm(cli, *kind, *p, *q, *r, *transpose, input),
        Command::Rectnorm { kind, couple, input } => rectnorm(cli, *kind, couple, input, &limits),
        Command::Split { couple, trace, input } => split(cli, couple, *trace, input, &limits),
        Command::Kt {
            oracle,
            couple,
            decomposition,
            input,
        } => kt(cli, *oracle, couple, *decomposition, input, &limits),
        Command::Interp {
            kind,
            t,
            theta,
            interp_q,
            p,
            q,
            source,
            ratio,
            span,
            center,
            input,
        } => {
            let grid = GridOptions {
                ratio: *ratio,
                span: *span,
                center: *center,
            };
            let couple = Couple::new(*p, *q)?;
            interp(
                cli, *kind, *t, *theta, *interp_q, &couple, *source, &grid, input, &limits,
            )
        }
        Command::Verify {
            trials,
            max_size,
            couples,
            ts,
            corrupt_split,
        } => {
            let config = VerifyConfig {
                trials: *trials,
                max_size: *max_size as usize,
                couples: parse_couples(couples)?,
                ts: parse_list(ts, "--ts")?,
                seed: cli.seed,
                limits,
                corrupt_split: *corrupt_split,
            };
            verify_cmd(cli, &config)
        }
        Command::Repro {
            case,
            n,
            p,
            q,
            t,
            trials,
        } => {
            let params = CaseParams {
                n: n.clone(),
                p: *p,
                q: *q,
                t: *t,
                trials: *trials,
                seed: cli.seed,
            };
            repro(cli, case, &params, &limits)
        }
        Command::Generate {
            rows,
            cols,
            masses,
            zero_prob,
        } => generate(cli, *rows, *cols, *masses, *zero_prob),
    }
}

fn norm(
    cli: &Cli,
    kind: NormKind,
    p: Option<f64>,
    q: Option<f64>,
    r: Option<f64>,
    transpose: bool,
    input: &InputArgs,
) -> Result<Outcome, CliError> {
    let (file, a) = load(input)?;
    let a = if transpose { a.transpose() } else { a };
    let mut rep = header(cli, "norm", Some(&file));
    rep.text("kind", value_name(&kind));
    rep.text("transpose", transpose);
    let product = || -> Result<MeasureSpace, CliError> {
        let masses: Vec<f64> = a
            .row_space()
            .masses()
            .iter()
            .flat_map(|mu| a.col_space().masses().iter().map(move |nu| mu * nu))
            .collect();
        Ok(MeasureSpace::new(masses)?)
    };
    let value = match kind {
        NormKind::Lq => {
            let q = required(q, "q", "lq")?;
            rep.text("q", fmt_exponent(q));
            lq_norm(a.entries(), &product()?, q)?
        }
        NormKind::Mixed => mixed_inf_one(&a),
        NormKind::Weak => {
            let p = required(p, "p", "weak")?;
            rep.text("p", fmt_exponent(p));
            mixkt::weak_lp_norm(a.entries(), &product()?, p)?
        }
        NormKind::Lorentz => {
            let p = required(p, "p", "lorentz")?;
            let q = required(q, "q", "lorentz")?;
            rep.text("p", fmt_exponent(p));
            rep.text("q", fmt_exponent(q));
            lorentz_norm(a.entries(), &product()?, p, q)?
        }
        NormKind::MixedWeak => {
            let p = required(p, "p", "mixed-weak")?;
            let q = required(q, "q", "mixed-weak")?;
            rep.text("p", fmt_exponent(p));
            rep.text("q", fmt_exponent(q));
            mixed_weak_norm(&a, p, q)?
        }
        NormKind::MixedLorentz => {
            let p = required(p, "p", "mixed-lorentz")?;
            let r = required(r, "r", "mixed-lorentz")?;
            let q = required(q, "q", "mixed-lorentz")?;
            rep.text("p", fmt_exponent(p));
            rep.text("r", fmt_exponent(r));
            rep.text("q", fmt_exponent(q));
            mixed_lorentz_norm(&a, p, r, q)?
        }
    };
    rep.num("value", value);
    Ok(rep.into())
}

fn rectnorm(
    cli: &Cli,
    kind: RectKind,
    couple: &CoupleArgs,
    input: &InputArgs,
    limits: &Limits,
) -> Result<Outcome, CliError> {
    let (file, a) = load(input)?;
    let mut rep = header(cli, "rectnorm", Some(&file));
    rep.text("kind", value_name(&kind));
    match kind {
        RectKind::Triple | RectKind::Quad => {
            let spec = spec_of(couple)?;
            couple_lines(&mut rep, &spec);
            let res = if kind == RectKind::Triple {
                triple_norm_with(&a, &spec, limits)?
            } else {
                quad_norm_with(&a, &spec, limits)?
            };
            rect_lines(&mut rep, &a, &res);
        }
        RectKind::P1 => {
            rep.num("t", couple.t);
            let closed = triple_norm_p1_degenerate(&a, couple.t)?;
            let direct = triple_norm_p1_direct(&a, couple.t, limits)?;
            rep.num("closed_form", closed);
            rect_lines(&mut rep, &a, &direct);
        }
    }
    Ok(rep.into())
}

fn split(cli: &Cli, couple: &CoupleArgs, trace: bool, input: &InputArgs, limits: &Limits) -> Result<Outcome, CliError> {
    let (file, a) = load(input)?;
    let spec = spec_of(couple)?;
    let s = split_with(&a, &spec, limits)?;
    let mut rep = header(cli, "split", Some(&file));
    couple_lines(&mut rep, &spec);
    rep.num("scale", s.scale);
    rep.num("bound_a", s.bound_a);
    rep.num("bound_b", s.bound_b);
    rep.num("upper", s.upper());
    if s.scale > 0.0 {
        rep.num("upper_over_scale", s.upper() / s.scale);
    }
    rep.text("certified", "yes");
    rep.cells("a_cells", &s.a_cells());
    rep.cells("b_cells", &s.b_cells());
    mask_lines(&mut rep, &s.mask, s.ncols, 'A', 'B');
    if trace {
        rep.text("stages", s.trace.stages.len());
        for (k, st) in s.trace.stages.iter().enumerate() {
            let order: Vec<String> = st.column_order.iter().map(|j| j.to_string()).collect();
            rep.text(
                &format!("stage[{k}]"),
                format!(
                    "rows={:?} column_order=[{}] k={} chosen_row={}",
                    st.active_rows,
                    order.join(","),
                    st.k,
                    st.chosen_row
                ),
            );
        }
    }
    Ok(rep.into())
}

fn kt(
    cli: &Cli,
    oracle: Oracle,
    couple: &CoupleArgs,
    show: bool,
    input: &InputArgs,
    limits: &Limits,
) -> Result<Outcome, CliError> {
    let (file, a) = load(input)?;
    let spec = spec_of(couple)?;
    let mut rep = header(cli, "kt", Some(&file));
    rep.text("oracle", value_name(&oracle));
    couple_lines(&mut rep, &spec);
    let decomposition = match oracle {
        Oracle::Bracket | Oracle::Refined => {
            let b = if oracle == Oracle::Bracket {
                kt_bracket_with(&a, &spec, limits)?
            } else {
                kt_bracket_refined(&a, &spec, limits)?
            };
            rep.num("lower", b.lower);
            rep.num("upper", b.upper);
            rep.text("lower_source", b.lower_source.as_str());
            rep.text("upper_source", b.upper_source.as_str());
            rep.num("scale", b.scale);
            rep.num("c_pq", spec.c_pq());
            b.decomposition
        }
        Oracle::Lp => {
            if !spec.couple().is_infinity_one() {
                return Err(usage("the lp oracle needs --p inf --q 1"));
            }
            let x = kt_exact_lp_with(&a, spec.t(), limits)?;
            rep.num("value", x.value);
            Some((x.b, x.c))
        }
        Oracle::Mask => {
            let m = kt_mask_bruteforce_with(&a, &spec, limits)?;
            rep.num("value", m.value);
            mask_lines(&mut rep, &m.mask, a.ncols(), 'b', 'c');
            Some(m.decomposition(&a))
        }
    };
    if show {
        if let Some((b, c)) = decomposition {
            matrix_lines(&mut rep, "b", &b);
            matrix_lines(&mut rep, "c", &c);
        }
    }
    Ok(rep.into())
}

fn theta_of(theta: Option<f64>, kind: &str) -> Result<f64, CliError> {
    required(theta, "theta", kind)
}

#[allow(clippy::too_many_arguments)]
fn interp(
    cli: &Cli,
    kind: InterpKind,
    t: Option<f64>,
    theta: Option<f64>,
    interp_q: f64,
    couple: &Couple,
    source: Source,
    grid: &GridOptions,
    input: &InputArgs,
    limits: &Limits,
) -> Result<Outcome, CliError> {
    let (file, a) = load(input)?;
    let mut rep = header(cli, "interp", Some(&file));
    rep.text("kind", value_name(&kind));
    match kind {
        InterpKind::OpTriple => {
            let t = required(t, "t", "op-triple")?;
            rep.num("t", t);
            let u = OperatorKernel::new(a.clone());
            rect_lines(&mut rep, &a, &op_triple_norm_with(&u, t, limits)?);
        }
        InterpKind::Bracket => {
            let spec = InterpSpec::new(theta_of(theta, "bracket")?, f64::INFINITY)?;
            rep.num("theta", spec.theta());
            rep.num("p", spec.p());
            let u = OperatorKernel::new(a.clone());
            rect_lines(&mut rep, &a, &bracket_u_p_with(&u, &spec, limits)?);
        }
        InterpKind::ThetaInf => {
            let spec = InterpSpec::new(theta_of(theta, "theta-inf")?, f64::INFINITY)?;
            rep.num("theta", spec.theta());
            let sup = theta_inf_norm_with(&OperatorKernel::new(a), &spec, limits)?;
            rep.num("value", sup.value);
            rep.num("argmax_t", sup.t);
        }
        InterpKind::ThetaQ => {
            let spec = InterpSpec::new(theta_of(theta, "theta-q")?, interp_q)?;
            let src = match source {
                Source::Bracket => KtSource::Bracket,
                Source::Lp => KtSource::ExactLp,
            };
            rep.num("theta", spec.theta());
            rep.text("interp_q", fmt_exponent(spec.q()));
            rep.text("p", fmt_exponent(couple.p()));
            rep.text("q", fmt_exponent(couple.q()));
            rep.text("source", value_name(&source));
            rep.num("grid_ratio", grid.ratio);
            rep.num("grid_span", grid.span);
            let iv = theta_q_norm(&a, &spec, couple, src, grid, limits)?;
            rep.num("lower", iv.lower);
            rep.num("upper", iv.upper);
            rep.num("midpoint", iv.midpoint());
            rep.num("width", iv.width());
        }
        InterpKind::WeakType => {
            let spec = InterpSpec::new(theta_of(theta, "weak-type")?, f64::INFINITY)?;
            let p = spec.p();
            let u = OperatorKernel::new(a);
            let w = weak_type_check_with(&u, p, limits)?;
            let bracket = bracket_u_p_with(&u, &spec, limits)?.value;
            let holds = w <= bracket * (1.0 + 1e-9) && bracket <= conjugate(p) * w * (1.0 + 1e-9);
            rep.num("theta", spec.theta());
            rep.num("p", p);
            rep.num("weak_type", w);
            rep.num("bracket", bracket);
            rep.num("p_star", conjugate(p));
            rep.text("relation", if holds { "holds" } else { "violated" });
            let mut out: Outcome = rep.into();
            out.ok = holds;
            return Ok(out);
        }
    }
    Ok(rep.into())
}

fn parse_list(s: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|x| crate::parse_positive(x).map_err(|e| usage(format!("{flag}: {e}"))))
        .collect()
}

fn parse_couples(s: &str) -> Result<Vec<(f64, f64)>, CliError> {
    s.split(',')
        .map(|pair| {
            let (p, q) = pair
                .split_once(':')
                .ok_or_else(|| usage(format!("--couples: expected p:q, got '{pair}'")))?;
            let p = crate::parse_exponent(p).map_err(|e| usage(format!("--couples: {e}")))?;
            let q = crate::parse_exponent(q).map_err(|e| usage(format!("--couples: {e}")))?;
            Couple::new(p, q).map_err(|e| usage(format!("--couples: {e}")))?;
            Ok((p, q))
        })
        .collect()
}

fn verify_cmd(cli: &Cli, config: &VerifyConfig) -> Result<Outcome, CliError> {
    let tallies = verify::run(config)?;
    let mut rep = header(cli, "verify", None);
    rep.text("trials", config.trials);
    rep.text("max_size", config.max_size);
    let couples: Vec<String> = config
        .couples
        .iter()
        .map(|(p, q)| format!("{}:{}", fmt_exponent(*p), fmt_exponent(*q)))
        .collect();
    rep.text("couples", couples.join(","));
    let ts: Vec<String> = config.ts.iter().map(|t| t.to_string()).collect();
    rep.text("ts", ts.join(","));
    let mut ok = true;
    for t in &tallies {
        rep.text(&format!("property[{}]", t.name), format!("{}/{}", t.passed, t.checked));
        if let Some(msg) = &t.first_failure {
            rep.text(&format!("first_failure[{}]", t.name), msg);
        }
        ok &= t.ok();
    }
    rep.text("result", if ok { "pass" } else { "fail" });
    Ok(Outcome { text: rep.render(), ok })
}

fn repro(cli: &Cli, case: &str, params: &CaseParams, limits: &Limits) -> Result<Outcome, CliError> {
    let report = run_case(case, params, limits)?;
    let mut rep = header(cli, "repro", None);
    rep.text("case", &report.case_id);
    for (k, v) in &report.params {
        rep.text(k, v);
    }
    for (k, v) in &report.computed {
        rep.num(k, *v);
    }
    for c in &report.checks {
        let status = if c.passed() { "pass" } else { "FAIL" };
        rep.text(
            &format!("check[{}]", c.name),
            format!(
                "{status} computed={} expected {} basis={}",
                crate::report::fmt_num(c.computed, cli.digits as usize),
                c.expect.describe(),
                c.basis.as_str()
            ),
        );
    }
    let ok = report.passed();
    rep.text("result", if ok { "pass" } else { "fail" });
    Ok(Outcome { text: rep.render(), ok })
}

fn generate(cli: &Cli, rows: usize, cols: usize, masses: Masses, zero_prob: f64) -> Result<Outcome, CliError> {
    if rows == 0 || cols == 0 {
        return Err(usage("--rows and --cols must be positive"));
    }
    if !(0.0..=1.0).contains(&zero_prob) {
        return Err(usage(format!("--zero-prob must lie in [0,1], got {zero_prob}")));
    }
    let profile = match masses {
        Masses::Unit => MassProfile::Unit,
        Masses::Wide => MassProfile::wide(),
    };
    let a = random_matrix(&mut rng(cli.seed), rows, cols, profile, zero_prob);
    let mut file = InstanceFile::from_matrix(&a);
    file.name = Some(format!("random-{rows}x{cols}-seed{}", cli.seed));
    Ok(Outcome {
        text: file.to_json() + "\n",
        ok: true,
    })
}
