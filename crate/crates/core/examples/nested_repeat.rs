//! The nested-repeat word algebra under a custom and the exponential degree schedule.
use operadkit::worked_examples::{nested_repeat_pipeline, NestedRepeatConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = nested_repeat_pipeline(&NestedRepeatConfig::custom(vec![1, 5, 40]))?;
    for s in &r.stages {
        println!("s = {}: d = {}, α = {}, β = {}, window = {:?}", s.s, s.d, s.alpha, s.beta, s.window.as_ref().map(|w| &w.dims));
    }
    let e = nested_repeat_pipeline(&NestedRepeatConfig::exponential(3))?;
    for s in &e.stages {
        let c = s.schedule_certificate.as_ref().unwrap();
        println!("s = {}: d = {}, certificate {:?} holds = {}", s.s, s.d, c.method, c.holds);
    }
    Ok(())
}
