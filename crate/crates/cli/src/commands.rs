use std::path::Path;

use minklab::combinatorics::{simplex_spider_volume, stability_constant};
use minklab::counterexamples::{conjecture2_gap, cube_measure_check, ellipse_measure_check, BlockFamily};
use minklab::grid::{GridFrame, GridSet, Mode};
use minklab::lab::{
    audit_monotonicity, boundary_diagnostics, hausdorff_convergence, holes_audit, lemma2_check, sandwich,
    simplex_cells, staircase_cells, AuditReport,
};
use minklab::rational::{self, Rational};
use minklab::spec::{default_h0, parse_spec, schedule, RunConfig, SetSpec};
use minklab::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::*;
use crate::report::{self, expectation, flags, Failure, Outcome, Report, Status};

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Audit(a) => audit(a, false),
        Command::Holes(a) => audit(a, true),
        Command::SimplexExact(a) => simplex_exact(a),
        Command::Lemma2(a) => lemma2(a),
        Command::Boundary(a) => boundary(a),
        Command::Hausdorff(a) => hausdorff(a),
        Command::Counterexample(c) => counterexample(c),
        Command::Sweep(a) => sweep(a),
        Command::Check(a) => check(a),
    }
}

fn load_spec(path: &Path) -> Outcome<SetSpec> {
    Ok(parse_spec(&report::read(path)?)?)
}

fn path_str(p: &Option<std::path::PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.display().to_string())
}

fn config_of(a: &AuditArgs, spec: &SetSpec) -> RunConfig {
    let h0 = a.res.clone().unwrap_or_else(|| default_h0(spec.dim()));
    RunConfig {
        k_max: a.kmax,
        resolutions: schedule(&h0, 2, a.refine),
        tol: a.tol,
        cap: a.cap,
        workers: a.output.workers,
        out: path_str(&a.output.out),
        csv: path_str(&a.csv),
        expect_monotone: a.expect_monotone,
        hausdorff: !a.no_hausdorff,
    }
}

fn audit_flags(r: &AuditReport) -> Vec<(&'static str, Value)> {
    vec![
        ("kind", json!(r.kind)),
        ("dim", json!(r.dim)),
        ("hull_volume", json!(r.hull_volume.as_ref().map(rational::format))),
        ("all_certified", json!(r.all_certified())),
        ("has_violation", json!(r.has_violation())),
        ("consistent", json!(r.consistent)),
        ("dim_deficient", json!(r.flags.dim_deficient)),
        ("hull_reached", json!(r.flags.hull_reached)),
        ("hull_reached_from", json!(r.flags.hull_reached_from)),
    ]
}

fn audit(a: AuditArgs, holes: bool) -> Outcome {
    let spec = load_spec(&a.set)?;
    let config = config_of(&a, &spec);
    let (audit, extra) = if holes {
        let r = holes_audit(&spec, &config)?;
        let bites_hold = r.bites_hold();
        let extra = (json!(bites_hold), Some(json!({"boundary_bites": r.boundary_bites, "bite_checks": r.bite_checks})));
        (r.audit, extra)
    } else {
        (audit_monotonicity(&spec, &config)?, (Value::Null, None))
    };
    let mut f = audit_flags(&audit);
    if holes {
        f.push(("bites_hold", extra.0));
    }
    let mut doc = Report::new(
        if holes { "holes" } else { "audit" },
        json!({"run": config, "spec": spec}),
        &audit.entries,
        flags(&f),
    );
    if let Some(d) = extra.1 {
        doc = doc.with_details(d);
    }
    doc.emit(a.output.out.as_ref())?;
    if let Some(csv) = &a.csv {
        report::write(csv, &audit.to_csv())?;
    }
    if audit.infeasible() {
        return Err(Failure::new(Status::Infeasible, "no k was measured within the cell cap"));
    }
    expectation(a.expect_monotone, &report::to_value(&doc))
}

fn simplex_exact(a: SimplexArgs) -> Outcome {
    let mut rows = Vec::new();
    let mut csv = String::from("k,volume,volume_float,stability_constant\n");
    let mut prev: Option<Rational> = None;
    let mut monotone = true;
    for k in 1..=a.kmax {
        let v = simplex_spider_volume(a.dim, k)?;
        let c = match stability_constant(a.dim, k) {
            Ok(c) => Some(c),
            Err(Error::BelowStabilityThreshold { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let step = prev.as_ref().map(|p| &v >= p);
        monotone &= step != Some(false);
        csv += &format!(
            "{k},{},{:.12},{}\n",
            rational::format(&v),
            rational::to_f64(&v),
            c.as_ref().map(rational::format).unwrap_or_default()
        );
        rows.push(json!({
            "k": k,
            "volume": rational::format(&v),
            "nondecreasing": step,
            "stability_constant": c.as_ref().map(rational::format),
        }));
        prev = Some(v);
    }
    Report::new(
        "simplex-exact",
        json!({"dim": a.dim, "k_max": a.kmax}),
        rows,
        flags(&[("nondecreasing", json!(monotone))]),
    )
    .emit(a.output.out.as_ref())?;
    if let Some(path) = &a.csv {
        report::write(path, &csv)?;
    }
    Ok(())
}

fn lemma2(a: Lemma2Args) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut sets = vec![
        ("staircase".to_string(), staircase_cells(a.dim, a.k, a.cells)?),
        ("simplex".to_string(), simplex_cells(a.dim, a.k, a.cells)?),
    ];
    for t in 0..a.trials {
        let p: f64 = rng.gen();
        sets.push((format!("random-{t}"), sandwich(a.dim, a.k, a.cells, |_| rng.gen_bool(p))?));
    }
    let mut rows = Vec::new();
    let mut details = Vec::new();
    let mut all = true;
    for (name, m) in &sets {
        let r = lemma2_check(a.dim, a.k, m)?;
        let holds = r.all_hold() && r.stability_holds != Some(false);
        all &= holds;
        rows.push(json!({
            "set": name,
            "cells": m.count(),
            "holds": holds,
            "cells_min_slack": rational::format(&r.cells_min_slack),
            "stability_holds": r.stability_holds,
        }));
        details.push(json!({"set": name, "report": r}));
    }
    Report::new(
        "lemma2",
        json!({"dim": a.dim, "k": a.k, "cells": a.cells, "trials": a.trials, "seed": a.seed}),
        rows,
        flags(&[("all_hold", json!(all))]),
    )
    .with_details(details)
    .emit(a.output.out.as_ref())?;
    if all {
        Ok(())
    } else {
        Err(Failure::new(Status::Expectation, "the layer inequality failed on some set"))
    }
}

/// Cells whose centre satisfies `keep`, on `[0, 5/4]^d` at spacing `h`.
fn preset(d: usize, h: &Rational, keep: impl Fn(&[f64]) -> bool) -> Outcome<GridSet> {
    let extent = rational::to_f64(&(rational::rat(5, 4) / h)).ceil() as usize;
    let frame = GridFrame::new(vec![rational::int(0); d], h.clone(), vec![extent; d])?;
    let mut out = GridSet::empty(frame.clone(), Mode::Exact)?;
    for c in GridSet::full(frame.clone(), Mode::Exact)?.cells() {
        if keep(&frame.cell_center(&c)) {
            out.insert(&c)?;
        }
    }
    Ok(out)
}

fn boundary(a: BoundaryArgs) -> Outcome {
    let d = a.dim;
    let radius = |p: &[f64], c: f64| p.iter().map(|x| (x - c) * (x - c)).sum::<f64>().sqrt();
    let set = match a.shape {
        Shape::Disc => preset(d, &a.res, |p| radius(p, 0.625) <= 0.5)?,
        Shape::Square => preset(d, &a.res, |p| p.iter().all(|x| (x - 0.625).abs() <= 0.5))?,
        Shape::Annulus => preset(d, &a.res, |p| (0.25..=0.5).contains(&radius(p, 0.625)))?,
        Shape::DiscPoint => {
            let mut s = preset(d, &a.res, |p| radius(p, 0.5) <= 0.4)?;
            let far = s.frame().extents()[0].saturating_sub(2);
            s.insert(&vec![far; d])?;
            s
        }
    };
    let r = boundary_diagnostics(&set)?;
    let rejected = r.boundary_components != 1;
    let f = flags(&[
        ("passes", json!(r.passes())),
        ("identical", json!(r.identical)),
        ("rejected", json!(rejected)),
    ]);
    Report::new("boundary", json!({"shape": format!("{:?}", a.shape), "dim": d, "res": rational::format(&a.res)}), [&r], f)
        .emit(a.output.out.as_ref())
}

fn hausdorff(a: HausdorffArgs) -> Outcome {
    let spec = load_spec(&a.set)?;
    let h = a.res.clone().unwrap_or_else(|| default_h0(spec.dim()));
    let series = hausdorff_convergence(&spec, &a.ks, &h, a.cap, a.tol)?;
    if let Some(path) = &a.csv {
        let mut csv = String::from("k,distance,slack\n");
        for p in &series.points {
            csv += &format!("{},{:.12},{:.12}\n", p.k, p.distance, p.slack);
        }
        report::write(path, &csv)?;
    }
    Report::new(
        "hausdorff",
        json!({"spec": spec, "ks": a.ks, "res": rational::format(&h), "cap": a.cap, "tol": a.tol}),
        &series.points,
        flags(&[("decay_exponent", json!(series.decay_exponent))]),
    )
    .emit(a.output.out.as_ref())
}

fn counterexample(c: Counterexample) -> Outcome {
    match c {
        Counterexample::Gap(a) => {
            let family = BlockFamily::new(a.a.clone(), a.b.clone(), a.d1, a.d2)?;
            let r = conjecture2_gap(&family)?;
            Report::new(
                "counterexample gap",
                report::to_value(&family),
                [&r],
                flags(&[("gap", json!(r.gap)), ("certified_negative", json!(r.certified_negative))]),
            )
            .emit(a.output.out.as_ref())
        }
        Counterexample::MeasureCube(a) => {
            let r = cube_measure_check(a.dim, a.k)?;
            let f = flags(&[
                ("parity_drop", json!(r.parity.strict_drop)),
                ("period_drop", json!(r.period.strict_drop)),
            ]);
            Report::new("counterexample measure-cube", json!({"dim": a.dim, "k": a.k}), [&r], f)
                .emit(a.output.out.as_ref())
        }
        Counterexample::MeasureEllipse(a) => {
            let r = ellipse_measure_check(a.k, a.resolution)?;
            let f = flags(&[
                ("drop_certified", json!(r.drop_certified)),
                ("quarter_contained_exact", json!(r.quarter_contained_exact)),
            ]);
            Report::new("counterexample measure-ellipse", json!({"k": a.k, "resolution": a.resolution}), [&r], f)
                .emit(a.output.out.as_ref())
        }
    }
}

fn sweep(a: SweepArgs) -> Outcome {
    let mut rows = Vec::new();
    let mut csv = String::from("a,b,d1,d2,v12,v13,v23,v123,gap\n");
    let mut negatives = 0;
    for x in &a.a {
        for y in &a.b {
            for &d1 in &a.d1 {
                for &d2 in &a.d2 {
                    let r = conjecture2_gap(&BlockFamily::new(x.clone(), y.clone(), d1, d2)?)?;
                    let v = &r.volumes;
                    csv += &format!(
                        "{},{},{d1},{d2},{},{},{},{},{:.12}\n",
                        rational::format(x),
                        rational::format(y),
                        rational::format(&v.v12),
                        rational::format(&v.v13),
                        rational::format(&v.v23),
                        rational::format(&v.v123),
                        r.gap
                    );
                    negatives += r.certified_negative as usize;
                    rows.push(r);
                }
            }
        }
    }
    if let Some(path) = &a.csv {
        report::write(path, &csv)?;
    }
    let fmt = |v: &[Rational]| v.iter().map(rational::format).collect::<Vec<_>>();
    Report::new(
        "sweep",
        json!({"a": fmt(&a.a), "b": fmt(&a.b), "d1": a.d1, "d2": a.d2}),
        &rows,
        flags(&[("certified_negative", json!(negatives))]),
    )
    .emit(a.output.out.as_ref())
}

fn check(a: CheckArgs) -> Outcome {
    let text = report::read(&a.report)?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::new(Status::Usage, format!("{}: {e}", a.report.display())))?;
    let ks = report::violations(&doc)?;
    println!("{} certified violation(s)", ks.len());
    expectation(a.expect_monotone, &doc)
}
