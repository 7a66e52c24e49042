use ffpe::farfield::{windowed_truncation_error_study, FarFieldConfig};
use ffpe::quadrature::RuleCache;

fn main() {
    let cache = RuleCache::new();
    let cfg = FarFieldConfig::default();
    let rows = windowed_truncation_error_study(
        &[80.0, 160.0, 320.0, 640.0, 1280.0, 2560.0],
        |z: f64, lo: f64| z.cos() - lo * z.sin(),
        1.0,
        0.4,
        0.01,
        -0.82835952299051113433,
        &cfg,
        &cache,
    )
    .unwrap();
    for (m, e1, e2) in rows {
        println!("M={m:6} E1={e1:.5e} E2={e2:.5e}");
    }
}
