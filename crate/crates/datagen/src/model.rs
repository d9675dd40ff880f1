//! A dataset is the time-ordered list of insert operations that builds it.

use std::collections::{BTreeMap, HashMap, HashSet};

use finbench_core::{Money, Timestamp};
use finbench_engine::{EdgeRecord, Engine, VertexRecord};
use finbench_workloads::{format_time, Write};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::sf::File;

/// One time-stamped fact. `op` is one of the insert writes TW1..TW16.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: Timestamp,
    pub op: Write,
}

impl Event {
    /// `time|TWn|field|...`
    pub fn to_line(&self) -> String {
        let mut parts = vec![format_time(self.time), self.op.name()];
        parts.extend(self.op.fields());
        parts.join("|")
    }
}

/// The files an operation contributes a row to.
pub fn files_of(op: &Write) -> &'static [File] {
    use Write::*;
    match op {
        AddPerson { .. } => &[File::Person],
        AddCompany { .. } => &[File::Company],
        AddMedium { .. } => &[File::Medium],
        AddPersonAccount { .. } => &[File::Account, File::PersonOwnAccount],
        AddCompanyAccount { .. } => &[File::Account, File::CompanyOwnAccount],
        AddPersonLoan { .. } => &[File::Loan, File::PersonApplyLoan],
        AddCompanyLoan { .. } => &[File::Loan, File::CompanyApplyLoan],
        PersonInvest { .. } => &[File::PersonInvest],
        CompanyInvest { .. } => &[File::CompanyInvest],
        PersonGuarantee { .. } => &[File::PersonGuarantee],
        CompanyGuarantee { .. } => &[File::CompanyGuarantee],
        Transfer { .. } => &[File::Transfer],
        Withdraw { .. } => &[File::Withdraw],
        Repay { .. } => &[File::Repay, File::LoanTransfer],
        Deposit { .. } => &[File::Deposit, File::LoanTransfer],
        SignIn { .. } => &[File::SignIn],
        DeleteAccount { .. } | BlockAccount { .. } | BlockPerson { .. } => &[],
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    /// Ordered by time; ties keep insertion order.
    pub events: Vec<Event>,
}

impl Dataset {
    pub fn new(mut events: Vec<Event>) -> Dataset {
        events.sort_by_key(|e| e.time);
        Dataset { events }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Rows per output file, in [`crate::FILES`] order.
    pub fn counts(&self) -> [u64; 19] {
        let mut c = [0u64; 19];
        for e in &self.events {
            for f in files_of(&e.op) {
                c[*f as usize] += 1;
            }
        }
        c
    }

    pub fn count(&self, f: File) -> u64 {
        self.counts()[f as usize]
    }

    pub fn first_time(&self) -> Option<Timestamp> {
        self.events.first().map(|e| e.time)
    }

    pub fn last_time(&self) -> Option<Timestamp> {
        self.events.last().map(|e| e.time)
    }

    /// Vertices and edges in event order, ready for a bulk load.
    pub fn records(&self) -> (Vec<VertexRecord>, Vec<EdgeRecord>) {
        let mut vs = Vec::new();
        let mut es = Vec::new();
        for e in &self.events {
            if let Some((v, ed)) = e.op.records() {
                vs.extend(v);
                es.extend(ed);
            }
        }
        (vs, es)
    }

    pub fn load(&self, engine: &Engine) -> Result<()> {
        let (v, e) = self.records();
        engine.bulk_load(v, e)?;
        Ok(())
    }

    /// Hex sha256 over the event lines.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for e in &self.events {
            h.update(e.to_line().as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }

    /// Schema rules the generator promises: endpoints exist and precede the
    /// edge in time, one owner per account, one applicant per loan, invest
    /// and guarantee at most once per pair, withdraw targets are cards,
    /// amounts positive, times strictly increasing. Returns every violation.
    pub fn violations(&self) -> Vec<String> {
        use Write::*;
        let mut c = Checker::default();
        let mut prev: Option<Timestamp> = None;
        for (i, e) in self.events.iter().enumerate() {
            c.at = (i, e.time);
            if prev.is_some_and(|p| p >= e.time) {
                c.fail("time not increasing");
            }
            prev = Some(e.time);
            if e.op.time().is_some_and(|t| t != e.time) {
                c.fail("op time differs from event time");
            }
            match &e.op {
                AddPerson { person_id, .. } => c.create(PERSON, *person_id),
                AddCompany { company_id, .. } => c.create(COMPANY, *company_id),
                AddMedium { medium_id, .. } => c.create(MEDIUM, *medium_id),
                AddPersonAccount {
                    person_id: o,
                    account_id,
                    account_type,
                    ..
                }
                | AddCompanyAccount {
                    company_id: o,
                    account_id,
                    account_type,
                    ..
                } => {
                    let k = if matches!(e.op, AddCompanyAccount { .. }) {
                        COMPANY
                    } else {
                        PERSON
                    };
                    c.need(k, *o);
                    c.create(ACCOUNT, *account_id);
                    if account_type == "card" {
                        c.card.insert(*account_id);
                    }
                }
                AddPersonLoan {
                    person_id: o,
                    loan_id,
                    loan_amount,
                    balance,
                    ..
                }
                | AddCompanyLoan {
                    company_id: o,
                    loan_id,
                    loan_amount,
                    balance,
                    ..
                } => {
                    let k = if matches!(e.op, AddCompanyLoan { .. }) {
                        COMPANY
                    } else {
                        PERSON
                    };
                    c.need(k, *o);
                    c.create(LOAN, *loan_id);
                    c.positive(*loan_amount);
                    if balance.cents() < 0 || balance > loan_amount {
                        c.fail("balance outside [0, amount]");
                    }
                }
                PersonInvest {
                    person_id: a,
                    company_id: b,
                    ratio,
                    ..
                }
                | CompanyInvest {
                    company_id1: a,
                    company_id2: b,
                    ratio,
                    ..
                } => {
                    let k = if matches!(e.op, CompanyInvest { .. }) {
                        COMPANY
                    } else {
                        PERSON
                    };
                    c.need(k, *a);
                    c.need(COMPANY, *b);
                    c.pair(k, *a, *b);
                    if !(*ratio > 0.0 && *ratio <= 1.0) {
                        c.fail("ratio out of range");
                    }
                }
                PersonGuarantee {
                    person_id1: a,
                    person_id2: b,
                    ..
                }
                | CompanyGuarantee {
                    company_id1: a,
                    company_id2: b,
                    ..
                } => {
                    let k = if matches!(e.op, CompanyGuarantee { .. }) {
                        COMPANY
                    } else {
                        PERSON
                    };
                    c.need(k, *a);
                    c.need(k, *b);
                    c.pair(k + 10, *a, *b);
                }
                Transfer {
                    account_id1,
                    account_id2,
                    amount,
                    ..
                } => {
                    c.need(ACCOUNT, *account_id1);
                    c.need(ACCOUNT, *account_id2);
                    c.positive(*amount);
                }
                Withdraw {
                    account_id1,
                    account_id2,
                    amount,
                    ..
                } => {
                    c.need(ACCOUNT, *account_id1);
                    c.need(ACCOUNT, *account_id2);
                    c.positive(*amount);
                    if !c.card.contains(account_id2) {
                        c.fail("withdraw to a non-card account");
                    }
                }
                Repay {
                    account_id,
                    loan_id,
                    amount,
                    ..
                }
                | Deposit {
                    loan_id,
                    account_id,
                    amount,
                    ..
                } => {
                    c.need(ACCOUNT, *account_id);
                    c.need(LOAN, *loan_id);
                    c.positive(*amount);
                }
                SignIn {
                    medium_id,
                    account_id,
                    ..
                } => {
                    c.need(MEDIUM, *medium_id);
                    c.need(ACCOUNT, *account_id);
                }
                DeleteAccount { .. } | BlockAccount { .. } | BlockPerson { .. } => {
                    c.fail("not an insert")
                }
            }
        }
        c.out
    }

    /// `name=value` lines: one per file plus totals.
    pub fn stats_text(&self) -> String {
        let mut m: BTreeMap<String, String> = BTreeMap::new();
        for (f, n) in File::ALL.iter().zip(self.counts()) {
            m.insert(f.name().to_owned(), n.to_string());
        }
        m.insert("events".into(), self.len().to_string());
        if let (Some(a), Some(b)) = (self.first_time(), self.last_time()) {
            m.insert("firstTime".into(), format_time(a));
            m.insert("lastTime".into(), format_time(b));
        }
        m.into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

const PERSON: u8 = 0;
const COMPANY: u8 = 1;
const MEDIUM: u8 = 2;
const ACCOUNT: u8 = 3;
const LOAN: u8 = 4;

#[derive(Default)]
struct Checker {
    at: (usize, Timestamp),
    born: HashMap<(u8, u64), Timestamp>,
    card: HashSet<u64>,
    pairs: HashSet<(u8, u64, u64)>,
    out: Vec<String>,
}

impl Checker {
    fn fail(&mut self, msg: &str) {
        self.out.push(format!("event {}: {msg}", self.at.0));
    }

    fn need(&mut self, kind: u8, id: u64) {
        match self.born.get(&(kind, id)) {
            None => self.fail(&format!("endpoint {kind}:{id} missing")),
            Some(t) if *t >= self.at.1 => self.fail(&format!("endpoint {kind}:{id} not older")),
            _ => {}
        }
    }

    fn create(&mut self, kind: u8, id: u64) {
        if self.born.insert((kind, id), self.at.1).is_some() {
            self.fail(&format!("duplicate vertex {kind}:{id}"));
        }
    }

    fn pair(&mut self, kind: u8, a: u64, b: u64) {
        if a == b && kind >= 10 {
            self.fail("self guarantee");
        }
        if !self.pairs.insert((kind, a, b)) {
            self.fail(&format!("repeated pair {a}->{b}"));
        }
    }

    fn positive(&mut self, m: Money) {
        if m.cents() <= 0 {
            self.fail("non-positive amount");
        }
    }
}
