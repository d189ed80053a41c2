//! Box-counting dimension of the support boundary of each binary graphon.
//!
//! Usage: `cargo run --release --example box_dimension`

use gnde::catalog::{box_counting_dimension, default_schedule, BoundarySet, GraphonSpec, ValueClass, CATALOG_NAMES};

fn main() -> gnde::Result<()> {
    for name in CATALOG_NAMES {
        let spec = GraphonSpec::by_name(name)?;
        if spec.value_class() != ValueClass::Binary {
            continue;
        }
        let schedule = default_schedule(&spec);
        let count = box_counting_dimension(&BoundarySet(&spec), &schedule)?;
        let nominal = spec.nominal_box_dim().map_or("-".to_string(), |d| format!("{d:.3}"));
        println!(
            "{name:>12}: estimate {:.3} ± {:.3}, nominal {nominal}, scales {schedule:?}",
            count.estimate, count.stderr
        );
    }
    Ok(())
}
