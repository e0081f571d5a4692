use anyhow::Result;
use serde_json::{json, Value};
use specbox::exec::Exec;
use specbox::inclusion::{
    bdo_inflate, enumerate_pseudoergodic, gamma_fin_inflated, grid_points, hausdorff, mu_grid, pi_fin_inflated,
    EnumerationMethod, FinSet, GridSpec, InclusionMethod, IndexFamily, PointSet, SectionFamily, SymbolAlphabet,
};
use specbox::operator::OperatorSpec;
use specbox::oracle::{periodic_spectrum, periodic_sweep, pseudoergodic_period_union};
use specbox::penalty::{eps_pi, eps_rational, eps_tau, eps_tau1, Mode, RationalKind};
use specbox::C64;

use crate::args::{
    turns_to_unit, FamilyArgs, HausdorffArgs, InclusionArgs, MethodArg, OracleArgs, PenaltyArgs, SourceArgs,
    SpectrumArgs,
};
use crate::io::{
    complex_json, emit_summary, input_file, load_alphabet, load_k_file, load_operator, load_points, num, usage, Csv,
    LoadedOperator,
};

pub fn penalty(a: &PenaltyArgs) -> Result<()> {
    let mut csv = Csv::new(&[
        "n",
        "tau_optimal",
        "tau_corollary_a",
        "tau_corollary_b",
        "pi",
        "tau1",
        "rational_star",
        "rational_dagger",
    ]);
    for &n in &a.n.0 {
        let tau = |mode| eps_tau(n, a.r, a.s, mode).map(|v| v.value);
        csv.row(&[
            n.to_string(),
            num(tau(Mode::Optimal).map_err(|e| usage(e.to_string()))?),
            num(tau(Mode::CorollaryA)?),
            num(tau(Mode::CorollaryB)?),
            num(eps_pi(n, a.r, a.s)),
            num(eps_tau1(n, a.r, a.s)),
            num(eps_rational(RationalKind::Star, n, a.r, a.s)),
            num(eps_rational(RationalKind::Dagger, n, a.r, a.s)),
        ]);
    }
    csv.finish(&a.out)
}

/// Operator and alphabet named on the command line.
struct Source {
    operator: Option<LoadedOperator>,
    alphabet: Option<SymbolAlphabet>,
}

impl Source {
    fn load(a: &SourceArgs) -> Result<Self> {
        let operator = a.operator.as_deref().map(load_operator).transpose()?;
        let alphabet = match &a.alphabet {
            Some(p) => Some(load_alphabet(p)?),
            None => operator.as_ref().and_then(|o| o.alphabet.clone()),
        };
        Ok(Self { operator, alphabet })
    }

    fn operator(&self) -> Result<&OperatorSpec> {
        self.operator
            .as_ref()
            .map(|o| &o.op)
            .ok_or_else(|| usage("--operator is required"))
    }

    fn alphabet(&self) -> Result<&SymbolAlphabet> {
        self.alphabet
            .as_ref()
            .ok_or_else(|| usage("no alphabet: pass --alphabet or add an `alphabet` entry to the operator file"))
    }
}

fn section_family(f: &FamilyArgs, op: &OperatorSpec) -> Result<(IndexFamily, String)> {
    if let Some((lo, hi)) = f.window {
        return Ok((IndexFamily::WindowScan { lo, hi }, format!("window {lo}..{hi}")));
    }
    if let Some(path) = &f.k_file {
        return Ok((
            IndexFamily::ExplicitK(load_k_file(path)?),
            format!("k-file {}", path.display()),
        ));
    }
    match op.period() {
        Some(p) => Ok((
            IndexFamily::ExplicitK((0..p as i64).collect()),
            format!("period indices 0..{}", p - 1),
        )),
        None => Err(usage(
            "operator is not periodic: pass --window, --k-file or --enumerate",
        )),
    }
}

fn default_threshold(method: InclusionMethod, n: usize, r: f64, s: f64) -> Result<f64> {
    Ok(match method {
        InclusionMethod::Tau => eps_tau(n, r, s, Mode::Optimal)?.value,
        InclusionMethod::Pi { .. } => eps_pi(n, r, s),
        InclusionMethod::Tau1 => eps_tau1(n, r, s),
    })
}

pub fn inclusion(a: &InclusionArgs, exec: Exec) -> Result<()> {
    if a.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let t = turns_to_unit(a.t_turns);
    let method = match a.method {
        MethodArg::Tau => InclusionMethod::Tau,
        MethodArg::Pi => InclusionMethod::Pi { t },
        MethodArg::Tau1 => InclusionMethod::Tau1,
    };
    let src = Source::load(&a.source)?;
    let (fam, r, s, bound, family_label) = if a.source.family.enumerate {
        let alphabet = src.alphabet()?;
        let em = match method {
            InclusionMethod::Tau => EnumerationMethod::Tau,
            InclusionMethod::Pi { t } => EnumerationMethod::PiWith(t),
            InclusionMethod::Tau1 => return Err(usage("--enumerate supports the tau and pi methods")),
        };
        let family = enumerate_pseudoergodic(alphabet, a.n, em, a.source.cap)?;
        let fam = SectionFamily::from_enumerated(method, a.n, &family)?;
        (
            fam,
            alphabet.alpha_max(),
            alphabet.gamma_max(),
            alphabet.norm_bound(),
            "enumerate".to_string(),
        )
    } else {
        let op = src.operator()?;
        let (family, label) = section_family(&a.source.family, op)?;
        let fam = SectionFamily::build(op, method, a.n, &family)?;
        (fam, op.alpha_max, op.gamma_max, op.norm_bound(), label)
    };
    let base = match a.eps {
        Some(e) => e,
        None => default_threshold(method, a.n, r, s)?,
    };
    let inflated = bdo_inflate(base, a.bdo_delta)?;
    let grid = GridSpec::new(a.grid_n.unwrap_or(a.n), a.radius.unwrap_or(bound))?;
    let points = grid_points(&grid);
    let mg = mu_grid(&fam, &points, inflated.inner, exec);

    let mut csv = Csv::new(&["re", "im", "mu", "member"]);
    for (i, (z, mu)) in mg.points.iter().zip(&mg.mu_values).enumerate() {
        csv.row(&[num(z.re), num(z.im), num(*mu), u8::from(mg.is_member(i)).to_string()]);
    }
    csv.finish(&a.out)?;
    let members = (0..mg.points.len()).filter(|&i| mg.is_member(i)).count();
    emit_summary(
        &a.out,
        &json!({
            "command": "inclusion",
            "method": method.name(),
            "n": a.n,
            "t": complex_json(t),
            "family": family_label,
            "family_size": fam.len(),
            "base_threshold": base,
            "bdo_delta": a.bdo_delta,
            "threshold": inflated.inner,
            "outer_threshold": inflated.outer,
            "grid_n": grid.n,
            "grid_radius": grid.radius,
            "grid_points": mg.points.len(),
            "members": members,
        }),
    )
}

fn fin_json(n: usize, fin: &FinSet, oracle: Option<&PointSet>, exec: Exec) -> Result<Value> {
    let dh = match oracle {
        Some(o) if !fin.centers.is_empty() => Some(hausdorff(&fin.centers, o, exec)?),
        _ => None,
    };
    Ok(json!({
        "n": n,
        "threshold": fin.threshold,
        "dilation_radius": fin.radius,
        "grid_radius": fin.grid.radius,
        "grid_spacing": fin.grid.spacing(),
        "family_size": fin.family_size,
        "points": fin.centers.len(),
        "hausdorff_to_oracle": dh,
    }))
}

pub fn spectrum_approx(a: &SpectrumArgs, exec: Exec) -> Result<()> {
    let src = Source::load(&a.source)?;
    let t = turns_to_unit(a.t_turns);
    let oracle = match a.period_union {
        Some(p) => Some(pseudoergodic_period_union(
            src.alphabet()?,
            p,
            a.samples,
            a.source.cap,
            exec,
        )?),
        None => match &src.operator {
            Some(o) if o.op.period().is_some() && !a.source.family.enumerate => {
                Some(periodic_spectrum(&o.op, a.samples, exec)?)
            }
            _ => None,
        },
    };
    let mut csv = Csv::new(&["n", "re", "im"]);
    let mut runs = Vec::new();
    let (pipeline, family_label) = if a.source.family.enumerate {
        let alphabet = src.alphabet()?;
        for &n in &a.n.0 {
            let fin = pi_fin_inflated(alphabet, n, t, a.source.cap, a.bdo_delta, exec)?;
            push_points(&mut csv, n, &fin.centers);
            runs.push(fin_json(n, &fin, oracle.as_ref(), exec)?);
        }
        ("pi_fin", "enumerate".to_string())
    } else {
        let op = src.operator()?;
        let (family, label) = section_family(&a.source.family, op)?;
        for &n in &a.n.0 {
            let fin = gamma_fin_inflated(op, n, &family, a.bdo_delta, exec)?;
            push_points(&mut csv, n, &fin.centers);
            runs.push(fin_json(n, &fin, oracle.as_ref(), exec)?);
        }
        ("gamma_fin", label)
    };
    csv.finish(&a.out)?;
    emit_summary(
        &a.out,
        &json!({
            "command": "spectrum-approx",
            "pipeline": pipeline,
            "t": complex_json(t),
            "family": family_label,
            "bdo_delta": a.bdo_delta,
            "oracle_points": oracle.as_ref().map(PointSet::len),
            "runs": runs,
        }),
    )
}

fn push_points(csv: &mut Csv, n: usize, set: &PointSet) {
    for z in set.iter() {
        csv.row(&[n.to_string(), num(z.re), num(z.im)]);
    }
}

pub fn oracle(a: &OracleArgs, exec: Exec) -> Result<()> {
    let src = Source::load(&a.source)?;
    let mut csv = Csv::new(&["re", "im", "z_re", "z_im"]);
    let summary = if let Some(p) = a.period_union {
        let alphabet = src
            .alphabet
            .as_ref()
            .ok_or_else(|| input_file("--period-union needs a symbol alphabet"))?;
        let union = pseudoergodic_period_union(alphabet, p, a.samples, a.source.cap, exec)?;
        for z in union.iter() {
            csv.row(&[num(z.re), num(z.im), String::new(), String::new()]);
        }
        json!({"command": "oracle", "source": "period-union", "max_period": p, "samples": a.samples, "points": union.len()})
    } else {
        let op = src.operator()?;
        if op.period().is_none() {
            return Err(input_file(
                "operator is not periodic and no --period-union alphabet was given",
            ));
        }
        let sweep = periodic_sweep(op, a.samples, 0, exec)?;
        let mut rows = 0;
        for (z, eigs) in sweep.z.iter().zip(&sweep.eigenvalues) {
            for l in eigs {
                csv.row(&[num(l.re), num(l.im), num(z.re), num(z.im)]);
                rows += 1;
            }
        }
        json!({
            "command": "oracle",
            "source": "periodic",
            "period": op.period(),
            "samples": a.samples,
            "points": rows,
            "max_adjacent_gap": sweep.max_adjacent_gap(),
        })
    };
    csv.finish(&a.out)?;
    emit_summary(&a.out, &summary)
}

pub fn hausdorff_cmd(a: &HausdorffArgs, exec: Exec) -> Result<()> {
    let load = |p| -> Result<PointSet> {
        let pts: Vec<C64> = load_points(p, a.n).map_err(|e| input_file(format!("{e:#}")))?;
        Ok(PointSet::new(pts))
    };
    let (x, y) = (load(&a.a)?, load(&a.b)?);
    let d = hausdorff(&x, &y, exec)?;
    println!("{}", json!({"hausdorff": d, "a_points": x.len(), "b_points": y.len()}));
    Ok(())
}
