//! `|`-separated files with a header row, one per table.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write as _};
use std::path::Path;

use finbench_core::{Money, Timestamp};
use finbench_workloads::{format_time, parse_time, Write};

use crate::error::{DatagenError, Result};
use crate::model::{Dataset, Event};
use crate::sf::File;
use crate::split::{UpdateEvent, UpdateStream};

pub const STREAM_FILE: &str = "updateStream.csv";
const STREAM_HEADER: [&str; 4] = ["time", "seq", "operation", "parameters"];

pub fn columns(f: File) -> &'static [&'static str] {
    match f {
        File::Person | File::Company => &["id", "name", "isBlocked", "createTime"],
        File::Medium => &["id", "type", "isBlocked", "createTime"],
        File::Account => &["id", "createTime", "isBlocked", "type"],
        File::PersonOwnAccount => &["personId", "accountId", "createTime"],
        File::CompanyOwnAccount => &["companyId", "accountId", "createTime"],
        File::Loan => &["id", "loanAmount", "balance", "createTime"],
        File::PersonApplyLoan => &["personId", "loanId", "createTime"],
        File::CompanyApplyLoan => &["companyId", "loanId", "createTime"],
        File::PersonInvest | File::CompanyInvest => {
            &["investorId", "companyId", "ratio", "createTime"]
        }
        File::PersonGuarantee | File::CompanyGuarantee => &["fromId", "toId", "createTime"],
        File::Transfer | File::Withdraw => &["fromId", "toId", "amount", "createTime"],
        File::Deposit => &["loanId", "accountId", "amount", "createTime"],
        File::Repay => &["accountId", "loanId", "amount", "createTime"],
        File::SignIn => &["mediumId", "accountId", "createTime"],
        File::LoanTransfer => &["fromId", "toId", "amount", "createTime", "type"],
    }
}

pub fn file_path(dir: &Path, f: File) -> std::path::PathBuf {
    dir.join(format!("{}.csv", f.name()))
}

fn writer(path: &Path) -> Result<csv::Writer<BufWriter<fs::File>>> {
    Ok(csv::WriterBuilder::new()
        .delimiter(b'|')
        .flexible(true)
        .from_writer(BufWriter::new(fs::File::create(path)?)))
}

/// Rows an event contributes, keyed by file.
fn rows(e: &Event) -> Vec<(File, Vec<String>)> {
    use Write::*;
    let t = format_time(e.time);
    let s = |x: &dyn ToString| x.to_string();
    match &e.op {
        AddPerson {
            person_id,
            name,
            is_blocked,
        } => vec![(
            File::Person,
            vec![s(person_id), name.clone(), s(is_blocked), t],
        )],
        AddCompany {
            company_id,
            name,
            is_blocked,
        } => vec![(
            File::Company,
            vec![s(company_id), name.clone(), s(is_blocked), t],
        )],
        AddMedium {
            medium_id,
            medium_type,
            is_blocked,
        } => vec![(
            File::Medium,
            vec![s(medium_id), medium_type.clone(), s(is_blocked), t],
        )],
        AddPersonAccount {
            person_id: o,
            account_id,
            account_blocked,
            account_type,
            ..
        }
        | AddCompanyAccount {
            company_id: o,
            account_id,
            account_blocked,
            account_type,
            ..
        } => {
            let own = if matches!(e.op, AddPersonAccount { .. }) {
                File::PersonOwnAccount
            } else {
                File::CompanyOwnAccount
            };
            vec![
                (
                    File::Account,
                    vec![
                        s(account_id),
                        t.clone(),
                        s(account_blocked),
                        account_type.clone(),
                    ],
                ),
                (own, vec![s(o), s(account_id), t]),
            ]
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
            let apply = if matches!(e.op, AddPersonLoan { .. }) {
                File::PersonApplyLoan
            } else {
                File::CompanyApplyLoan
            };
            vec![
                (
                    File::Loan,
                    vec![s(loan_id), s(loan_amount), s(balance), t.clone()],
                ),
                (apply, vec![s(o), s(loan_id), t]),
            ]
        }
        PersonInvest {
            person_id: a,
            company_id: b,
            ratio,
            ..
        } => vec![(File::PersonInvest, vec![s(a), s(b), s(ratio), t])],
        CompanyInvest {
            company_id1: a,
            company_id2: b,
            ratio,
            ..
        } => vec![(File::CompanyInvest, vec![s(a), s(b), s(ratio), t])],
        PersonGuarantee {
            person_id1: a,
            person_id2: b,
            ..
        } => vec![(File::PersonGuarantee, vec![s(a), s(b), t])],
        CompanyGuarantee {
            company_id1: a,
            company_id2: b,
            ..
        } => vec![(File::CompanyGuarantee, vec![s(a), s(b), t])],
        Transfer {
            account_id1: a,
            account_id2: b,
            amount,
            ..
        } => vec![(File::Transfer, vec![s(a), s(b), s(amount), t])],
        Withdraw {
            account_id1: a,
            account_id2: b,
            amount,
            ..
        } => vec![(File::Withdraw, vec![s(a), s(b), s(amount), t])],
        Deposit {
            loan_id,
            account_id,
            amount,
            ..
        } => vec![
            (
                File::Deposit,
                vec![s(loan_id), s(account_id), s(amount), t.clone()],
            ),
            (
                File::LoanTransfer,
                vec![s(loan_id), s(account_id), s(amount), t, "deposit".into()],
            ),
        ],
        Repay {
            account_id,
            loan_id,
            amount,
            ..
        } => vec![
            (
                File::Repay,
                vec![s(account_id), s(loan_id), s(amount), t.clone()],
            ),
            (
                File::LoanTransfer,
                vec![s(account_id), s(loan_id), s(amount), t, "repay".into()],
            ),
        ],
        SignIn {
            medium_id,
            account_id,
            ..
        } => vec![(File::SignIn, vec![s(medium_id), s(account_id), t])],
        DeleteAccount { .. } | BlockAccount { .. } | BlockPerson { .. } => Vec::new(),
    }
}

/// Writes all nineteen files into `dir` (created if missing).
pub fn write_dataset(ds: &Dataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut out: Vec<csv::Writer<BufWriter<fs::File>>> = Vec::new();
    for f in File::ALL {
        let mut w = writer(&file_path(dir, f))?;
        w.write_record(columns(f))?;
        out.push(w);
    }
    for e in &ds.events {
        for (f, row) in rows(e) {
            out[f as usize].write_record(&row)?;
        }
    }
    for mut w in out {
        w.flush()?;
    }
    Ok(())
}

struct Table {
    file: File,
    rows: Vec<csv::StringRecord>,
}

impl Table {
    fn read(dir: &Path, file: File) -> Result<Table> {
        let path = file_path(dir, file);
        let mut r = csv::ReaderBuilder::new().delimiter(b'|').from_path(&path)?;
        let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
        if header != columns(file) {
            return Err(DatagenError::Row {
                file: file.name().into(),
                row: 0,
                msg: format!("header {header:?}, expected {:?}", columns(file)),
            });
        }
        let rows = r.records().collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Table { file, rows })
    }

    fn err(&self, row: usize, msg: impl Into<String>) -> DatagenError {
        DatagenError::Row {
            file: self.file.name().into(),
            row: row + 1,
            msg: msg.into(),
        }
    }

    fn id(&self, row: usize, col: usize) -> Result<u64> {
        let s = &self.rows[row][col];
        s.parse()
            .map_err(|_| self.err(row, format!("bad id {s:?}")))
    }

    fn time(&self, row: usize, col: usize) -> Result<Timestamp> {
        parse_time(&self.rows[row][col]).map_err(|e| self.err(row, e.to_string()))
    }

    fn money(&self, row: usize, col: usize) -> Result<Money> {
        Money::parse(&self.rows[row][col]).map_err(|e| self.err(row, e.to_string()))
    }

    fn flag(&self, row: usize, col: usize) -> Result<bool> {
        let s = &self.rows[row][col];
        s.parse()
            .map_err(|_| self.err(row, format!("bad boolean {s:?}")))
    }

    fn ratio(&self, row: usize, col: usize) -> Result<f64> {
        let s = &self.rows[row][col];
        s.parse()
            .map_err(|_| self.err(row, format!("bad ratio {s:?}")))
    }

    fn text(&self, row: usize, col: usize) -> String {
        self.rows[row][col].to_owned()
    }
}

/// Reads the files written by [`write_dataset`]. `loanTransfer` is derived
/// from deposit and repay and is not read back.
pub fn read_dataset(dir: &Path) -> Result<Dataset> {
    use Write::*;
    let mut events = Vec::new();
    let mut push = |time: Timestamp, op: Write| events.push(Event { time, op });

    let t = Table::read(dir, File::Person)?;
    for i in 0..t.rows.len() {
        push(
            t.time(i, 3)?,
            AddPerson {
                person_id: t.id(i, 0)?,
                name: t.text(i, 1),
                is_blocked: t.flag(i, 2)?,
            },
        );
    }
    let t = Table::read(dir, File::Company)?;
    for i in 0..t.rows.len() {
        push(
            t.time(i, 3)?,
            AddCompany {
                company_id: t.id(i, 0)?,
                name: t.text(i, 1),
                is_blocked: t.flag(i, 2)?,
            },
        );
    }
    let t = Table::read(dir, File::Medium)?;
    for i in 0..t.rows.len() {
        push(
            t.time(i, 3)?,
            AddMedium {
                medium_id: t.id(i, 0)?,
                medium_type: t.text(i, 1),
                is_blocked: t.flag(i, 2)?,
            },
        );
    }

    let t = Table::read(dir, File::Account)?;
    let mut accounts: HashMap<u64, (Timestamp, bool, String)> = HashMap::new();
    for i in 0..t.rows.len() {
        accounts.insert(t.id(i, 0)?, (t.time(i, 1)?, t.flag(i, 2)?, t.text(i, 3)));
    }
    for own in [File::PersonOwnAccount, File::CompanyOwnAccount] {
        let t = Table::read(dir, own)?;
        for i in 0..t.rows.len() {
            let (o, a) = (t.id(i, 0)?, t.id(i, 1)?);
            let (time, account_blocked, account_type) = accounts
                .remove(&a)
                .ok_or_else(|| t.err(i, format!("account {a} missing or owned twice")))?;
            push(
                time,
                if own == File::PersonOwnAccount {
                    AddPersonAccount {
                        person_id: o,
                        account_id: a,
                        time,
                        account_blocked,
                        account_type,
                    }
                } else {
                    AddCompanyAccount {
                        company_id: o,
                        account_id: a,
                        time,
                        account_blocked,
                        account_type,
                    }
                },
            );
        }
    }
    if let Some(a) = accounts.keys().min() {
        return Err(DatagenError::Row {
            file: File::Account.name().into(),
            row: 0,
            msg: format!("account {a} has no owner"),
        });
    }

    let t = Table::read(dir, File::Loan)?;
    let mut loans: HashMap<u64, (Money, Money)> = HashMap::new();
    for i in 0..t.rows.len() {
        loans.insert(t.id(i, 0)?, (t.money(i, 1)?, t.money(i, 2)?));
    }
    for apply in [File::PersonApplyLoan, File::CompanyApplyLoan] {
        let t = Table::read(dir, apply)?;
        for i in 0..t.rows.len() {
            let (o, l, time) = (t.id(i, 0)?, t.id(i, 1)?, t.time(i, 2)?);
            let (loan_amount, balance) = loans
                .remove(&l)
                .ok_or_else(|| t.err(i, format!("loan {l} missing or applied twice")))?;
            push(
                time,
                if apply == File::PersonApplyLoan {
                    AddPersonLoan {
                        person_id: o,
                        loan_id: l,
                        loan_amount,
                        balance,
                        time,
                    }
                } else {
                    AddCompanyLoan {
                        company_id: o,
                        loan_id: l,
                        loan_amount,
                        balance,
                        time,
                    }
                },
            );
        }
    }
    if let Some(l) = loans.keys().min() {
        return Err(DatagenError::Row {
            file: File::Loan.name().into(),
            row: 0,
            msg: format!("loan {l} has no applicant"),
        });
    }

    let t = Table::read(dir, File::PersonInvest)?;
    for i in 0..t.rows.len() {
        let time = t.time(i, 3)?;
        push(
            time,
            PersonInvest {
                person_id: t.id(i, 0)?,
                company_id: t.id(i, 1)?,
                time,
                ratio: t.ratio(i, 2)?,
            },
        );
    }
    let t = Table::read(dir, File::CompanyInvest)?;
    for i in 0..t.rows.len() {
        let time = t.time(i, 3)?;
        push(
            time,
            CompanyInvest {
                company_id1: t.id(i, 0)?,
                company_id2: t.id(i, 1)?,
                time,
                ratio: t.ratio(i, 2)?,
            },
        );
    }
    let t = Table::read(dir, File::PersonGuarantee)?;
    for i in 0..t.rows.len() {
        let time = t.time(i, 2)?;
        push(
            time,
            PersonGuarantee {
                person_id1: t.id(i, 0)?,
                person_id2: t.id(i, 1)?,
                time,
            },
        );
    }
    let t = Table::read(dir, File::CompanyGuarantee)?;
    for i in 0..t.rows.len() {
        let time = t.time(i, 2)?;
        push(
            time,
            CompanyGuarantee {
                company_id1: t.id(i, 0)?,
                company_id2: t.id(i, 1)?,
                time,
            },
        );
    }
    for f in [File::Transfer, File::Withdraw] {
        let t = Table::read(dir, f)?;
        for i in 0..t.rows.len() {
            let (account_id1, account_id2) = (t.id(i, 0)?, t.id(i, 1)?);
            let (amount, time) = (t.money(i, 2)?, t.time(i, 3)?);
            push(
                time,
                if f == File::Transfer {
                    Transfer {
                        account_id1,
                        account_id2,
                        time,
                        amount,
                    }
                } else {
                    Withdraw {
                        account_id1,
                        account_id2,
                        time,
                        amount,
                    }
                },
            );
        }
    }
    let t = Table::read(dir, File::Deposit)?;
    for i in 0..t.rows.len() {
        let time = t.time(i, 3)?;
        push(
            time,
            Deposit {
                loan_id: t.id(i, 0)?,
                account_id: t.id(i, 1)?,
                time,
                amount: t.money(i, 2)?,
            },
        );
    }
    let t = Table::read(dir, File::Repay)?;
    for i in 0..t.rows.len() {
        let time = t.time(i, 3)?;
        push(
            time,
            Repay {
                account_id: t.id(i, 0)?,
                loan_id: t.id(i, 1)?,
                time,
                amount: t.money(i, 2)?,
            },
        );
    }
    let t = Table::read(dir, File::SignIn)?;
    for i in 0..t.rows.len() {
        let time = t.time(i, 2)?;
        push(
            time,
            SignIn {
                medium_id: t.id(i, 0)?,
                account_id: t.id(i, 1)?,
                time,
            },
        );
    }
    Ok(Dataset::new(events))
}

pub fn write_stream(stream: &UpdateStream, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = writer(path)?;
    w.write_record(STREAM_HEADER)?;
    for e in &stream.events {
        let mut row = vec![format_time(e.time), e.seq.to_string(), e.op.name()];
        row.extend(e.op.fields());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_stream(path: &Path) -> Result<UpdateStream> {
    let mut r = csv::ReaderBuilder::new()
        .delimiter(b'|')
        .flexible(true)
        .from_path(path)?;
    let name = STREAM_FILE.to_owned();
    let bad = |row: usize, msg: String| DatagenError::Row {
        file: name.clone(),
        row,
        msg,
    };
    let mut events = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() < 3 {
            return Err(bad(i + 1, "too few columns".into()));
        }
        let time = parse_time(&rec[0]).map_err(|e| bad(i + 1, e.to_string()))?;
        let seq = rec[1]
            .parse()
            .map_err(|_| bad(i + 1, format!("bad seq {:?}", &rec[1])))?;
        let number: u8 = rec[2]
            .strip_prefix("TW")
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| bad(i + 1, format!("bad operation {:?}", &rec[2])))?;
        let fields: Vec<&str> = rec.iter().skip(3).collect();
        let op = Write::from_fields(number, &fields).map_err(|e| bad(i + 1, e.to_string()))?;
        events.push(UpdateEvent { seq, time, op });
    }
    let mut s = UpdateStream { events };
    s.sort();
    Ok(s)
}

/// `name=value` lines.
pub fn write_stats(text: &str, path: &Path) -> Result<()> {
    let mut f = BufWriter::new(fs::File::create(path)?);
    f.write_all(text.as_bytes())?;
    f.flush()?;
    Ok(())
}
