use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use log::info;

use qcpm_core::compare::compare_correlation;
use qcpm_core::diagnostics::{
    entropy_table, nonpurity_trace, z_sweep, DiagnosticSeries, StateChoice,
};
use qcpm_core::io::{
    read_grid, read_params, read_record, synth_target, write_histogram, write_params, write_record,
    write_series, HistogramFile, HistogramMode, SynthConfig, TargetGrid, TrainedModel,
};
use qcpm_core::model::{train as run_training, ModelSpec, TrainConfig};
use qcpm_core::sampler::{draw_samples, exact_distribution, exact_rows, to_problem_domain};

use crate::{
    CompareArgs, DiagnoseArgs, Failure, ModelArgs, OptimArgs, SampleArgs, TargetArgs, TrainArgs,
};

fn require_file(path: &Path) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "input file not found: {}",
            path.display()
        )))
    }
}

fn model_spec(m: &ModelArgs) -> ModelSpec {
    ModelSpec {
        n_qubits: m.n,
        depth: m.depth,
        use_correlation: !m.no_correlation,
        entangler: m.entangler,
    }
}

fn train_config(model: ModelSpec, o: &OptimArgs, seed: u64) -> Result<TrainConfig, Failure> {
    let cfg = TrainConfig {
        model,
        epochs: o.epochs,
        learning_rates: o.lr.clone(),
        seed,
        refit_affine: o.refit_affine,
        init: o.init,
        ..TrainConfig::default()
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

/// Loads every grid file and builds every synthetic target, in that order.
fn load_targets(t: &TargetArgs, model: ModelSpec) -> Result<Vec<TargetGrid>, Failure> {
    for p in &t.grid {
        require_file(p)?;
    }
    let mut out = Vec::new();
    for p in &t.grid {
        let g = read_grid(p, model.n_qubits, None)
            .with_context(|| format!("reading grid {}", p.display()))?;
        info!(
            "{}: {} lattice points, label `{}`",
            p.display(),
            g.len(),
            g.label
        );
        out.push(g);
    }
    let synth = SynthConfig {
        model,
        rho: t.rho,
        sigma: t.sigma,
        ..SynthConfig::default()
    };
    for &kind in &t.synth {
        out.push(synth_target(kind, &synth, t.synth_seed)?);
    }
    Ok(out)
}

fn fmt_r2(r2: Option<f64>) -> String {
    r2.map_or("undefined (constant targets)".to_string(), |r| {
        format!("{r:.6}")
    })
}

pub fn train(a: TrainArgs) -> Result<(), Failure> {
    let model = model_spec(&a.model);
    if a.target.grid.len() + a.target.synth.len() != 1 {
        return Err(Failure::Usage(
            "train needs exactly one --grid FILE or --synth KIND".into(),
        ));
    }
    let mut cfg = train_config(model, &a.optim, a.seed)?;
    if a.nonpurity_cadence == Some(0) {
        return Err(Failure::Usage(
            "--nonpurity-cadence must be at least 1".into(),
        ));
    }
    cfg.diagnostics_cadence = a.nonpurity_cadence;
    let grid = load_targets(&a.target, model)?.remove(0);
    let record = run_training(&cfg, &grid)?;
    write_record(&record, &a.record)?;
    write_params(
        &TrainedModel::from_record(&record, grid.domain),
        &a.params_out,
    )?;
    println!("label: {}", record.label);
    println!("best learning rate: {}", record.best_learning_rate);
    println!("final loss: {:e}", record.final_loss());
    println!("final R^2: {}", fmt_r2(record.final_r2()));
    println!("record: {}", a.record.display());
    println!("params: {}", a.params_out.display());
    Ok(())
}

pub fn sample(a: SampleArgs) -> Result<(), Failure> {
    require_file(&a.params)?;
    let trained = read_params(&a.params)?;
    let dist = exact_distribution(&trained.params, &trained.model, a.s)?;
    let (mode, shots, rows) = if a.exact_only {
        (HistogramMode::Exact, 0, exact_rows(&dist, &trained.domain)?)
    } else {
        let shots = if a.scale_shots {
            4u64.checked_pow(a.s as u32)
                .and_then(|f| f.checked_mul(a.shots))
                .ok_or_else(|| Failure::Usage("scaled shot count overflows".into()))?
        } else {
            a.shots
        };
        let hist = draw_samples(&dist, shots, a.seed)?;
        println!(
            "total variation to exact: {:.3e}",
            hist.total_variation(&dist)
        );
        (
            HistogramMode::Sampled,
            shots,
            to_problem_domain(&hist, &trained.domain)?,
        )
    };
    let side = dist.side();
    write_histogram(
        &HistogramFile {
            n_qubits: trained.model.n_qubits,
            extension: a.s,
            shots,
            mode,
            domain: trained.domain,
            rows,
        },
        &a.out,
    )?;
    println!("lattice: {side}x{side}, shots: {shots}");
    println!("histogram: {}", a.out.display());
    Ok(())
}

fn emit(series: &DiagnosticSeries, dir: &Path) -> Result<PathBuf, Failure> {
    let path = dir.join(format!("{}.txt", series.kind.as_str()));
    write_series(series, &path)?;
    println!(
        "{}: {} rows -> {}",
        series.kind,
        series.len(),
        path.display()
    );
    Ok(path)
}

pub fn diagnose(a: DiagnoseArgs) -> Result<(), Failure> {
    if !a.nonpurity_trace && a.z_sweep.is_none() && !a.entropy {
        return Err(Failure::Usage(
            "choose at least one of --nonpurity-trace, --z-sweep, --entropy".into(),
        ));
    }
    if a.nonpurity_trace && a.record.is_none() {
        return Err(Failure::Usage(
            "--nonpurity-trace needs --record FILE".into(),
        ));
    }
    if a.z_sweep.is_some() && a.params.len() != 1 {
        return Err(Failure::Usage(
            "--z-sweep takes exactly one --params file".into(),
        ));
    }
    if let Some(r) = &a.record {
        require_file(r)?;
    }
    if a.z_sweep.is_some() || a.entropy {
        for p in &a.params {
            require_file(p)?;
        }
    }
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;

    if a.nonpurity_trace {
        let record = read_record(a.record.as_ref().unwrap())?;
        emit(&nonpurity_trace(&record)?, &a.out_dir)?;
    }
    if a.z_sweep.is_some() || a.entropy {
        let models = a
            .params
            .iter()
            .map(read_params)
            .collect::<qcpm_core::Result<Vec<TrainedModel>>>()?;
        if let Some(q) = a.z_sweep {
            let m = &models[0];
            emit(
                &z_sweep(&m.params, &m.model, q, a.v, a.resolution)?,
                &a.out_dir,
            )?;
        }
        if a.entropy {
            let spec = models[0].model;
            if models.iter().any(|m| m.model != spec) {
                return Err(Failure::Usage(
                    "--entropy needs models of one architecture".into(),
                ));
            }
            let labelled: Vec<_> = models
                .iter()
                .map(|m| (m.label.clone(), m.params.clone()))
                .collect();
            emit(
                &entropy_table(&labelled, &spec, StateChoice::Coefficient)?,
                &a.out_dir,
            )?;
        }
    }
    Ok(())
}

pub fn compare_cc(a: CompareArgs) -> Result<(), Failure> {
    if a.target.grid.is_empty() && a.target.synth.is_empty() {
        return Err(Failure::Usage(
            "compare-cc needs at least one --grid FILE or --synth KIND".into(),
        ));
    }
    if a.seeds.is_empty() {
        return Err(Failure::Usage("--seeds is empty".into()));
    }
    let model = model_spec(&a.model);
    let cfg = train_config(model, &a.optim, a.seeds[0])?;
    let targets = load_targets(&a.target, model)?;
    let table = compare_correlation(&cfg, &targets, &a.seeds)?;
    let text = table.to_text();
    fs::write(&a.out, &text).with_context(|| format!("writing {}", a.out.display()))?;
    print!("{text}");
    Ok(())
}
