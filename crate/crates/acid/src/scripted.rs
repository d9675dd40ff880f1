//! Fixed two-transaction interleavings for detector validation.

use std::sync::Arc;

use finbench_engine::script::{run_script, Body, Pauser, Schedule, ScriptOutcome};
use parking_lot::Mutex;

use crate::config::AcidConfig;
use crate::error::{AcidError, Result};

/// Step 1 of txn 1, step 1 of txn 2, then the rest of txn 1, then the rest
/// of txn 2. Every scripted scenario is written against this order.
pub const SCHEDULE: &str = "\
1 1 resume
1 1 pause
2 1 resume
2 1 pause
1 2 resume
1 2 pause
2 2 resume
2 2 pause
";

/// Collects scenario bodies; conflicts end a body quietly, anything else
/// fails the run.
#[derive(Default)]
pub(crate) struct Script {
    bodies: Vec<Body>,
    errors: Arc<Mutex<Vec<String>>>,
}

impl Script {
    pub(crate) fn txn(
        &mut self,
        f: impl FnOnce(&mut Pauser) -> finbench_engine::Result<()> + Send + 'static,
    ) {
        let errors = self.errors.clone();
        self.bodies.push(Box::new(move |p: &mut Pauser| {
            if let Err(e) = f(p) {
                if !e.is_conflict() {
                    errors.lock().push(e.to_string());
                }
            }
        }));
    }

    pub(crate) fn play(self, cfg: &AcidConfig) -> Result<ScriptOutcome> {
        let schedule: Schedule = SCHEDULE.parse().expect("built-in schedule");
        let out = run_script(self.bodies, &schedule, cfg.step_timeout);
        let errors = std::mem::take(&mut *self.errors.lock());
        match errors.first() {
            Some(e) => Err(AcidError::Client(e.clone())),
            None => Ok(out),
        }
    }
}
