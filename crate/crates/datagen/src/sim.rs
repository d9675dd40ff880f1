//! The activity simulation.
//!
//! Randomness is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `GeneratorConfig::seed`; every phase draws from its own stream
//! (`set_stream(phase)`), so changing one phase leaves the others intact.
//!
//! Persons, companies and media appear early in the span. Accounts and loans
//! follow their owner; every edge is placed strictly after both endpoints.
//! Owners and accounts carry Pareto activity weights, which produces hub
//! accounts. Per-kind event totals are Poisson around the scale-factor
//! target, so counts vary slightly with the seed.

use std::collections::{HashMap, HashSet};

use finbench_core::{Money, Timestamp};
use finbench_workloads::Write;
use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{LogNormal, Pareto, Poisson};

use crate::error::{DatagenError, Result};
use crate::model::{Dataset, Event};
use crate::sf::{File, ScaleFactorSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub sf: ScaleFactorSpec,
    /// Share of events kept as initial data.
    pub split_fraction: f64,
    /// Delete and block operations appended to the update stream, as a
    /// share of its inserts.
    pub delete_share: f64,
    /// Share of persons, accounts and media created blocked.
    pub blocked_fraction: f64,
}

impl GeneratorConfig {
    pub fn new(sf: ScaleFactorSpec, seed: u64) -> Self {
        GeneratorConfig {
            seed,
            sf,
            split_fraction: 0.97,
            delete_share: 0.001,
            blocked_fraction: 0.01,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(DatagenError::Config(format!(
                "split fraction must be in (0, 1), got {}",
                self.split_fraction
            )));
        }
        if !(0.0..1.0).contains(&self.delete_share) || !(0.0..1.0).contains(&self.blocked_fraction)
        {
            return Err(DatagenError::Config("shares must be in [0, 1)".into()));
        }
        if self.sf.end.0 - self.sf.start.0 < 86_400_000 {
            return Err(DatagenError::Config(
                "span must cover at least a day".into(),
            ));
        }
        Ok(())
    }
}

const MEDIUM_TYPES: [&str; 5] = ["POS", "ATM", "PHONE", "PC", "PAD"];
const PERSON_ACCOUNT_TYPES: [(&str, u32); 3] = [("card", 4), ("normal", 4), ("savings", 2)];
const COMPANY_ACCOUNT_TYPES: [(&str, u32); 3] = [("company", 7), ("card", 2), ("normal", 1)];
const MAX_WEIGHT: f64 = 500.0;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Owner {
    Person(usize),
    Company(usize),
}

struct Acct {
    id: u64,
    born: i64,
}

struct LoanInfo {
    id: u64,
    born: i64,
    applicant: Owner,
    amount: i64,
}

struct Sim {
    cfg: GeneratorConfig,
    start: i64,
    end: i64,
    used: HashSet<i64>,
    events: Vec<Event>,
    person_born: Vec<i64>,
    company_born: Vec<i64>,
    medium_born: Vec<i64>,
    person_ix: Option<WeightedIndex<f64>>,
    company_ix: Option<WeightedIndex<f64>>,
    accounts: Vec<Acct>,
    account_w: Vec<f64>,
    cards: Vec<usize>,
    owned: HashMap<Owner, Vec<usize>>,
    loans: Vec<LoanInfo>,
}

fn stream(seed: u64, phase: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(phase);
    r
}

fn poisson(rng: &mut ChaCha8Rng, mean: u64) -> usize {
    if mean == 0 {
        return 0;
    }
    Poisson::new(mean as f64)
        .expect("positive mean")
        .sample(rng) as usize
}

fn weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let p: Pareto<f64> = Pareto::new(1.0, 1.6).expect("valid pareto");
    (0..n).map(|_| p.sample(rng).min(MAX_WEIGHT)).collect()
}

fn pick_type(rng: &mut ChaCha8Rng, table: &[(&'static str, u32)]) -> &'static str {
    let idx = WeightedIndex::new(table.iter().map(|t| t.1)).expect("non-empty table");
    table[idx.sample(rng)].0
}

fn cents(rng: &mut ChaCha8Rng, d: &LogNormal<f64>, max: f64) -> i64 {
    (d.sample(rng).min(max) * 100.0).round().max(1.0) as i64
}

impl Sim {
    /// A fresh timestamp strictly after `after`, at most `reach` of the
    /// remaining span later. `None` if the span is used up.
    fn time_after(&mut self, rng: &mut ChaCha8Rng, after: i64, reach: f64) -> Option<i64> {
        let lo = after.max(self.start) + 1;
        // leave room at the end so a collision can always move forward
        let hi = self.end - 1_000;
        if lo >= hi {
            return None;
        }
        let width = (((hi - lo) as f64) * reach).max(1.0) as i64;
        let mut t = lo + rng.gen_range(0..width);
        while !self.used.insert(t) {
            t += 1;
        }
        Some(t)
    }

    fn push(&mut self, t: i64, op: Write) {
        self.events.push(Event {
            time: Timestamp(t),
            op,
        });
    }

    fn blocked(&self, rng: &mut ChaCha8Rng) -> bool {
        rng.gen_bool(self.cfg.blocked_fraction)
    }

    fn owner_born(&self, o: Owner) -> i64 {
        match o {
            Owner::Person(i) => self.person_born[i],
            Owner::Company(i) => self.company_born[i],
        }
    }

    fn population(&mut self) {
        let mut rng = stream(self.cfg.seed, 1);
        let sf = self.cfg.sf.clone();
        let early = 0.25;
        for i in 0..sf.target(File::Person) {
            let t = self
                .time_after(&mut rng, self.start - 1, early)
                .expect("span checked");
            let blocked = self.blocked(&mut rng);
            self.person_born.push(t);
            self.push(
                t,
                Write::AddPerson {
                    person_id: i + 1,
                    name: format!("Person{}", i + 1),
                    is_blocked: blocked,
                },
            );
        }
        for i in 0..sf.target(File::Company) {
            let t = self
                .time_after(&mut rng, self.start - 1, early)
                .expect("span checked");
            self.company_born.push(t);
            self.push(
                t,
                Write::AddCompany {
                    company_id: i + 1,
                    name: format!("Company{}", i + 1),
                    is_blocked: false,
                },
            );
        }
        for i in 0..sf.target(File::Medium) {
            let t = self
                .time_after(&mut rng, self.start - 1, early)
                .expect("span checked");
            let blocked = self.blocked(&mut rng);
            let ty = MEDIUM_TYPES[rng.gen_range(0..MEDIUM_TYPES.len())];
            self.medium_born.push(t);
            self.push(
                t,
                Write::AddMedium {
                    medium_id: i + 1,
                    medium_type: ty.to_owned(),
                    is_blocked: blocked,
                },
            );
        }
        self.person_ix = WeightedIndex::new(weights(&mut rng, self.person_born.len())).ok();
        self.company_ix = WeightedIndex::new(weights(&mut rng, self.company_born.len())).ok();
    }

    fn pick_owner(&self, rng: &mut ChaCha8Rng, person: bool) -> Option<Owner> {
        if person {
            Some(Owner::Person(self.person_ix.as_ref()?.sample(rng)))
        } else {
            Some(Owner::Company(self.company_ix.as_ref()?.sample(rng)))
        }
    }

    fn accounts(&mut self) {
        let mut rng = stream(self.cfg.seed, 2);
        let np = poisson(&mut rng, self.cfg.sf.target(File::PersonOwnAccount));
        let nc = poisson(&mut rng, self.cfg.sf.target(File::CompanyOwnAccount));
        let mut plan: Vec<bool> = [vec![true; np], vec![false; nc]].concat();
        plan.shuffle(&mut rng);
        for person in plan {
            let Some(owner) = self.pick_owner(&mut rng, person) else {
                continue;
            };
            let Some(t) = self.time_after(&mut rng, self.owner_born(owner), 0.6) else {
                continue;
            };
            let id = self.accounts.len() as u64 + 1;
            let blocked = self.blocked(&mut rng);
            let (ty, op) = match owner {
                Owner::Person(i) => {
                    let ty = pick_type(&mut rng, &PERSON_ACCOUNT_TYPES);
                    (
                        ty,
                        Write::AddPersonAccount {
                            person_id: i as u64 + 1,
                            account_id: id,
                            time: Timestamp(t),
                            account_blocked: blocked,
                            account_type: ty.to_owned(),
                        },
                    )
                }
                Owner::Company(i) => {
                    let ty = pick_type(&mut rng, &COMPANY_ACCOUNT_TYPES);
                    (
                        ty,
                        Write::AddCompanyAccount {
                            company_id: i as u64 + 1,
                            account_id: id,
                            time: Timestamp(t),
                            account_blocked: blocked,
                            account_type: ty.to_owned(),
                        },
                    )
                }
            };
            if ty == "card" {
                self.cards.push(self.accounts.len());
            }
            self.owned
                .entry(owner)
                .or_default()
                .push(self.accounts.len());
            self.accounts.push(Acct { id, born: t });
            self.push(t, op);
        }
        self.account_w = weights(&mut rng, self.accounts.len());
    }

    fn loans(&mut self) {
        let mut rng = stream(self.cfg.seed, 3);
        let np = poisson(&mut rng, self.cfg.sf.target(File::PersonApplyLoan));
        let nc = poisson(&mut rng, self.cfg.sf.target(File::CompanyApplyLoan));
        let mut plan: Vec<bool> = [vec![true; np], vec![false; nc]].concat();
        plan.shuffle(&mut rng);
        let amount = LogNormal::new((50_000f64).ln(), 1.0).expect("valid lognormal");
        for person in plan {
            let Some(owner) = self.pick_owner(&mut rng, person) else {
                continue;
            };
            let Some(t) = self.time_after(&mut rng, self.owner_born(owner), 0.7) else {
                continue;
            };
            let id = self.loans.len() as u64 + 1;
            let total = cents(&mut rng, &amount, 10_000_000.0).max(100_000);
            let balance = rng.gen_range(0..=total);
            let (loan_amount, balance) = (Money::from_cents(total), Money::from_cents(balance));
            let op = match owner {
                Owner::Person(i) => Write::AddPersonLoan {
                    person_id: i as u64 + 1,
                    loan_id: id,
                    loan_amount,
                    balance,
                    time: Timestamp(t),
                },
                Owner::Company(i) => Write::AddCompanyLoan {
                    company_id: i as u64 + 1,
                    loan_id: id,
                    loan_amount,
                    balance,
                    time: Timestamp(t),
                },
            };
            self.loans.push(LoanInfo {
                id,
                born: t,
                applicant: owner,
                amount: total,
            });
            self.push(t, op);
        }
    }

    /// Invest and guarantee edges; at most one per ordered pair.
    fn relations(&mut self) {
        let mut rng = stream(self.cfg.seed, 4);
        let sf = self.cfg.sf.clone();
        let mut seen: HashSet<(u8, Owner, Owner)> = HashSet::new();
        let jobs = [
            (0u8, true, File::PersonInvest),
            (0, false, File::CompanyInvest),
            (1, true, File::PersonGuarantee),
            (1, false, File::CompanyGuarantee),
        ];
        for (kind, person, file) in jobs {
            let n = poisson(&mut rng, sf.target(file));
            for _ in 0..n {
                for _attempt in 0..16 {
                    let Some(a) = self.pick_owner(&mut rng, person) else {
                        break;
                    };
                    let guarantee = kind == 1;
                    let Some(b) = self.pick_owner(&mut rng, guarantee && person) else {
                        break;
                    };
                    if a == b || !seen.insert((kind, a, b)) {
                        continue;
                    }
                    let dep = self.owner_born(a).max(self.owner_born(b));
                    let Some(t) = self.time_after(&mut rng, dep, 1.0) else {
                        break;
                    };
                    let id = |o: Owner| match o {
                        Owner::Person(i) | Owner::Company(i) => i as u64 + 1,
                    };
                    let time = Timestamp(t);
                    let ratio = f64::from(rng.gen_range(1u32..=100)) / 100.0;
                    let op = match (kind, person) {
                        (0, true) => Write::PersonInvest {
                            person_id: id(a),
                            company_id: id(b),
                            time,
                            ratio,
                        },
                        (0, false) => Write::CompanyInvest {
                            company_id1: id(a),
                            company_id2: id(b),
                            time,
                            ratio,
                        },
                        (_, true) => Write::PersonGuarantee {
                            person_id1: id(a),
                            person_id2: id(b),
                            time,
                        },
                        (_, false) => Write::CompanyGuarantee {
                            company_id1: id(a),
                            company_id2: id(b),
                            time,
                        },
                    };
                    self.push(t, op);
                    break;
                }
            }
        }
    }

    /// An account of the owner with probability `own`, else any account
    /// by activity weight.
    fn account_for(
        &self,
        rng: &mut ChaCha8Rng,
        owner: Owner,
        own: f64,
        all: &WeightedIndex<f64>,
    ) -> usize {
        if let Some(list) = self.owned.get(&owner) {
            if rng.gen_bool(own) {
                return list[rng.gen_range(0..list.len())];
            }
        }
        all.sample(rng)
    }

    fn money(&mut self) {
        if self.accounts.len() < 2 {
            return;
        }
        let mut rng = stream(self.cfg.seed, 5);
        let sf = self.cfg.sf.clone();
        let all = WeightedIndex::new(self.account_w.clone()).expect("positive weights");
        let cards = WeightedIndex::new(self.cards.iter().map(|&i| self.account_w[i])).ok();
        let transfer_amt = LogNormal::new((800f64).ln(), 1.3).expect("valid lognormal");
        let withdraw_amt = LogNormal::new((300f64).ln(), 1.0).expect("valid lognormal");

        for _ in 0..poisson(&mut rng, sf.target(File::Transfer)) {
            let (a, b) = (all.sample(&mut rng), all.sample(&mut rng));
            if a == b {
                continue;
            }
            let dep = self.accounts[a].born.max(self.accounts[b].born);
            let Some(t) = self.time_after(&mut rng, dep, 1.0) else {
                continue;
            };
            let op = Write::Transfer {
                account_id1: self.accounts[a].id,
                account_id2: self.accounts[b].id,
                time: Timestamp(t),
                amount: Money::from_cents(cents(&mut rng, &transfer_amt, 5_000_000.0)),
            };
            self.push(t, op);
        }

        if let Some(cards) = cards {
            for _ in 0..poisson(&mut rng, sf.target(File::Withdraw)) {
                let a = all.sample(&mut rng);
                let b = self.cards[cards.sample(&mut rng)];
                if a == b {
                    continue;
                }
                let dep = self.accounts[a].born.max(self.accounts[b].born);
                let Some(t) = self.time_after(&mut rng, dep, 1.0) else {
                    continue;
                };
                let op = Write::Withdraw {
                    account_id1: self.accounts[a].id,
                    account_id2: self.accounts[b].id,
                    time: Timestamp(t),
                    amount: Money::from_cents(cents(&mut rng, &withdraw_amt, 1_000_000.0)),
                };
                self.push(t, op);
            }
        }

        if !self.loans.is_empty() {
            for deposit in [true, false] {
                let file = if deposit { File::Deposit } else { File::Repay };
                for _ in 0..poisson(&mut rng, sf.target(file)) {
                    let l = rng.gen_range(0..self.loans.len());
                    let a = self.account_for(&mut rng, self.loans[l].applicant, 0.7, &all);
                    let dep = self.loans[l].born.max(self.accounts[a].born);
                    let Some(t) = self.time_after(&mut rng, dep, 1.0) else {
                        continue;
                    };
                    let share = if deposit {
                        rng.gen_range(0.05..0.4)
                    } else {
                        rng.gen_range(0.01..0.15)
                    };
                    let amount = Money::from_cents(
                        ((self.loans[l].amount as f64) * share).round().max(1.0) as i64,
                    );
                    let (loan_id, account_id, time) =
                        (self.loans[l].id, self.accounts[a].id, Timestamp(t));
                    let op = if deposit {
                        Write::Deposit {
                            loan_id,
                            account_id,
                            time,
                            amount,
                        }
                    } else {
                        Write::Repay {
                            account_id,
                            loan_id,
                            time,
                            amount,
                        }
                    };
                    self.push(t, op);
                }
            }
        }
    }

    fn sign_ins(&mut self) {
        if self.accounts.is_empty() || self.medium_born.is_empty() {
            return;
        }
        let mut rng = stream(self.cfg.seed, 6);
        let all = WeightedIndex::new(self.account_w.clone()).expect("positive weights");
        for _ in 0..poisson(&mut rng, self.cfg.sf.target(File::SignIn)) {
            let m = rng.gen_range(0..self.medium_born.len());
            let a = all.sample(&mut rng);
            let dep = self.medium_born[m].max(self.accounts[a].born);
            let Some(t) = self.time_after(&mut rng, dep, 1.0) else {
                continue;
            };
            let op = Write::SignIn {
                medium_id: m as u64 + 1,
                account_id: self.accounts[a].id,
                time: Timestamp(t),
            };
            self.push(t, op);
        }
    }
}

/// Runs the simulation over the whole span (no split).
pub fn generate(cfg: &GeneratorConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut sim = Sim {
        cfg: cfg.clone(),
        start: cfg.sf.start.0,
        end: cfg.sf.end.0,
        used: HashSet::new(),
        events: Vec::new(),
        person_born: Vec::new(),
        company_born: Vec::new(),
        medium_born: Vec::new(),
        person_ix: None,
        company_ix: None,
        accounts: Vec::new(),
        account_w: Vec::new(),
        cards: Vec::new(),
        owned: HashMap::new(),
        loans: Vec::new(),
    };
    sim.population();
    sim.accounts();
    sim.loans();
    sim.relations();
    sim.money();
    sim.sign_ins();
    Ok(Dataset::new(sim.events))
}
