//! Scripted interleavings.
//!
//! Each scripted transaction runs on its own thread and calls
//! [`Pauser::point`] between its steps. A schedule decides which step runs
//! when. Schedule files have one event per line:
//!
//! ```text
//! # <txn> <step> <resume|pause>
//! 1 1 resume   # let txn 1 run its first step
//! 1 1 pause    # wait until txn 1 has finished step 1
//! 2 1 resume
//! ```
//!
//! A `pause` that does not complete within the step timeout (the step is
//! blocked on a lock) is recorded and the schedule moves on.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use parking_lot::{Condvar, Mutex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Resume,
    Pause,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub txn: u32,
    pub step: u32,
    pub action: Action,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schedule {
    pub events: Vec<Event>,
}

impl Schedule {
    /// Runs steps strictly one after another in the given order.
    pub fn serial_steps(order: &[(u32, u32)]) -> Schedule {
        let mut events = Vec::new();
        for &(txn, step) in order {
            events.push(Event {
                txn,
                step,
                action: Action::Resume,
            });
            events.push(Event {
                txn,
                step,
                action: Action::Pause,
            });
        }
        Schedule { events }
    }
}

impl FromStr for Schedule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let mut events = Vec::new();
        for (n, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(format!("line {}: expected 3 fields", n + 1));
            }
            let txn = f[0]
                .parse()
                .map_err(|_| format!("line {}: bad txn id {}", n + 1, f[0]))?;
            let step = f[1]
                .parse()
                .map_err(|_| format!("line {}: bad step {}", n + 1, f[1]))?;
            let action = match f[2] {
                "resume" => Action::Resume,
                "pause" => Action::Pause,
                other => return Err(format!("line {}: bad action {other}", n + 1)),
            };
            events.push(Event { txn, step, action });
        }
        Ok(Schedule { events })
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.events {
            let a = match e.action {
                Action::Resume => "resume",
                Action::Pause => "pause",
            };
            writeln!(f, "{} {} {}", e.txn, e.step, a)?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Gate {
    allowed: u32,
    completed: u32,
    done: bool,
}

struct Control {
    gate: Mutex<Gate>,
    cv: Condvar,
}

/// Handed to a scripted transaction body.
pub struct Pauser {
    ctl: Arc<Control>,
    step: u32,
}

impl Pauser {
    fn wait_turn(&self) {
        let mut g = self.ctl.gate.lock();
        while g.allowed < self.step {
            self.ctl.cv.wait(&mut g);
        }
    }

    /// Ends the current step and parks until the next one is resumed.
    pub fn point(&mut self) {
        {
            let mut g = self.ctl.gate.lock();
            g.completed = self.step;
            self.ctl.cv.notify_all();
        }
        self.step += 1;
        self.wait_turn();
    }

    pub fn step(&self) -> u32 {
        self.step
    }
}

pub type Body = Box<dyn FnOnce(&mut Pauser) + Send>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScriptOutcome {
    /// Pause events that timed out, i.e. steps that were blocked.
    pub blocked: Vec<Event>,
}

/// Runs transaction bodies (numbered from 1 in order) under a schedule.
pub fn run_script(bodies: Vec<Body>, schedule: &Schedule, step_timeout: Duration) -> ScriptOutcome {
    let mut controls: HashMap<u32, Arc<Control>> = HashMap::new();
    let mut handles: Vec<JoinHandle<()>> = Vec::new();
    for (i, body) in bodies.into_iter().enumerate() {
        let ctl = Arc::new(Control {
            gate: Mutex::new(Gate::default()),
            cv: Condvar::new(),
        });
        controls.insert(i as u32 + 1, ctl.clone());
        handles.push(thread::spawn(move || {
            let mut p = Pauser {
                ctl: ctl.clone(),
                step: 1,
            };
            p.wait_turn();
            body(&mut p);
            let mut g = ctl.gate.lock();
            g.done = true;
            g.completed = u32::MAX;
            ctl.cv.notify_all();
        }));
    }
    let mut outcome = ScriptOutcome::default();
    for ev in &schedule.events {
        let Some(ctl) = controls.get(&ev.txn) else {
            continue;
        };
        let mut g = ctl.gate.lock();
        match ev.action {
            Action::Resume => {
                g.allowed = g.allowed.max(ev.step);
                ctl.cv.notify_all();
            }
            Action::Pause => {
                let deadline = Instant::now() + step_timeout;
                while g.completed < ev.step && !g.done {
                    if ctl.cv.wait_until(&mut g, deadline).timed_out() {
                        break;
                    }
                }
                if g.completed < ev.step && !g.done {
                    outcome.blocked.push(*ev);
                }
            }
        }
    }
    for ctl in controls.values() {
        let mut g = ctl.gate.lock();
        g.allowed = u32::MAX;
        ctl.cv.notify_all();
    }
    for h in handles {
        let _ = h.join();
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let s: Schedule = "1 1 resume\n1 1 pause # done\n\n2 3 resume\n"
            .parse()
            .unwrap();
        assert_eq!(s.events.len(), 3);
        assert_eq!(s.to_string().parse::<Schedule>().unwrap(), s);
        assert!("1 x resume".parse::<Schedule>().is_err());
        assert!("1 1 jump".parse::<Schedule>().is_err());
    }

    #[test]
    fn steps_follow_schedule() {
        let log = Arc::new(Mutex::new(Vec::new()));
        let mk = |name: &'static str, log: Arc<Mutex<Vec<String>>>| -> Body {
            Box::new(move |p: &mut Pauser| {
                log.lock().push(format!("{name}1"));
                p.point();
                log.lock().push(format!("{name}2"));
            })
        };
        let sched = Schedule::serial_steps(&[(1, 1), (2, 1), (2, 2), (1, 2)]);
        let out = run_script(
            vec![mk("a", log.clone()), mk("b", log.clone())],
            &sched,
            Duration::from_secs(5),
        );
        assert!(out.blocked.is_empty());
        assert_eq!(*log.lock(), vec!["a1", "b1", "b2", "a2"]);
    }
}
