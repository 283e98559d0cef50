//! Retrains a model on data generated by a random model of the same shape.
//!
//!     cargo run --release -p qcpm-core --example teacher_student -- [epochs]

use qcpm_core::io::{synth_target, SynthConfig, SynthKind};
use qcpm_core::model::{train, TrainConfig};

fn main() -> qcpm_core::Result<()> {
    let epochs = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("epochs must be an integer"))
        .unwrap_or(10_000);
    let grid = synth_target(SynthKind::TeacherStudent, &SynthConfig::default(), 1006)?;
    let cfg = TrainConfig {
        epochs,
        seed: 2,
        ..TrainConfig::default()
    };
    let rec = train(&cfg, &grid)?;
    for b in &rec.branches {
        println!(
            "lr {:.1}: loss {:.3e}, R^2 {:?}",
            b.learning_rate, b.final_loss, b.final_r2
        );
    }
    println!(
        "best lr {}, R^2 {:?}",
        rec.best_learning_rate,
        rec.final_r2()
    );
    Ok(())
}
