//! The nineteen write operations TW1..TW19.

use finbench_core::{Money, Timestamp};
use finbench_engine::{
    DeleteSummary, EdgeKind, EdgeRecord, Txn, VertexKind, VertexRecord, VertexRef,
};
use serde::{Deserialize, Serialize};

use crate::error::{Result, WorkloadError};
use crate::query::{format_time, parse_time};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "camelCase")]
pub enum Write {
    AddPerson {
        person_id: u64,
        name: String,
        is_blocked: bool,
    },
    AddCompany {
        company_id: u64,
        name: String,
        is_blocked: bool,
    },
    AddMedium {
        medium_id: u64,
        medium_type: String,
        is_blocked: bool,
    },
    AddPersonAccount {
        person_id: u64,
        account_id: u64,
        time: Timestamp,
        account_blocked: bool,
        account_type: String,
    },
    AddCompanyAccount {
        company_id: u64,
        account_id: u64,
        time: Timestamp,
        account_blocked: bool,
        account_type: String,
    },
    AddPersonLoan {
        person_id: u64,
        loan_id: u64,
        loan_amount: Money,
        balance: Money,
        time: Timestamp,
    },
    AddCompanyLoan {
        company_id: u64,
        loan_id: u64,
        loan_amount: Money,
        balance: Money,
        time: Timestamp,
    },
    PersonInvest {
        person_id: u64,
        company_id: u64,
        time: Timestamp,
        ratio: f64,
    },
    CompanyInvest {
        company_id1: u64,
        company_id2: u64,
        time: Timestamp,
        ratio: f64,
    },
    PersonGuarantee {
        person_id1: u64,
        person_id2: u64,
        time: Timestamp,
    },
    CompanyGuarantee {
        company_id1: u64,
        company_id2: u64,
        time: Timestamp,
    },
    Transfer {
        account_id1: u64,
        account_id2: u64,
        time: Timestamp,
        amount: Money,
    },
    Withdraw {
        account_id1: u64,
        account_id2: u64,
        time: Timestamp,
        amount: Money,
    },
    Repay {
        account_id: u64,
        loan_id: u64,
        time: Timestamp,
        amount: Money,
    },
    Deposit {
        loan_id: u64,
        account_id: u64,
        time: Timestamp,
        amount: Money,
    },
    SignIn {
        medium_id: u64,
        account_id: u64,
        time: Timestamp,
    },
    DeleteAccount {
        account_id: u64,
    },
    BlockAccount {
        account_id: u64,
    },
    BlockPerson {
        person_id: u64,
    },
}

/// Parameter column names of TW1..TW19, indexed by number - 1.
const COLUMNS: [&[&str]; 19] = [
    &["personId", "personName", "isBlocked"],
    &["companyId", "companyName", "isBlocked"],
    &["mediumId", "mediumType", "isBlocked"],
    &[
        "personId",
        "accountId",
        "time",
        "accountBlocked",
        "accountType",
    ],
    &[
        "companyId",
        "accountId",
        "time",
        "accountBlocked",
        "accountType",
    ],
    &["personId", "loanId", "loanAmount", "balance", "time"],
    &["companyId", "loanId", "loanAmount", "balance", "time"],
    &["personId", "companyId", "time", "ratio"],
    &["companyId1", "companyId2", "time", "ratio"],
    &["personId1", "personId2", "time"],
    &["companyId1", "companyId2", "time"],
    &["accountId1", "accountId2", "time", "amount"],
    &["accountId1", "accountId2", "time", "amount"],
    &["accountId", "loanId", "time", "amount"],
    &["loanId", "accountId", "time", "amount"],
    &["mediumId", "accountId", "time"],
    &["accountId"],
    &["accountId"],
    &["personId"],
];

pub fn write_columns(number: u8) -> Option<&'static [&'static str]> {
    COLUMNS.get(usize::from(number).checked_sub(1)?).copied()
}

fn bad(what: &str, s: &str) -> WorkloadError {
    WorkloadError::Params(format!("bad {what} {s:?}"))
}

fn id(s: &str) -> Result<u64> {
    s.trim().parse().map_err(|_| bad("id", s))
}

fn flag(s: &str) -> Result<bool> {
    match s.trim() {
        "true" | "True" | "TRUE" => Ok(true),
        "false" | "False" | "FALSE" => Ok(false),
        _ => Err(bad("boolean", s)),
    }
}

fn money(s: &str) -> Result<Money> {
    Ok(Money::parse(s)?)
}

fn float(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| bad("number", s))
}

impl Write {
    /// The TW number, 1..=19.
    pub fn number(&self) -> u8 {
        use Write::*;
        match self {
            AddPerson { .. } => 1,
            AddCompany { .. } => 2,
            AddMedium { .. } => 3,
            AddPersonAccount { .. } => 4,
            AddCompanyAccount { .. } => 5,
            AddPersonLoan { .. } => 6,
            AddCompanyLoan { .. } => 7,
            PersonInvest { .. } => 8,
            CompanyInvest { .. } => 9,
            PersonGuarantee { .. } => 10,
            CompanyGuarantee { .. } => 11,
            Transfer { .. } => 12,
            Withdraw { .. } => 13,
            Repay { .. } => 14,
            Deposit { .. } => 15,
            SignIn { .. } => 16,
            DeleteAccount { .. } => 17,
            BlockAccount { .. } => 18,
            BlockPerson { .. } => 19,
        }
    }

    pub fn name(&self) -> String {
        format!("TW{}", self.number())
    }

    /// Parameter values in column order.
    pub fn fields(&self) -> Vec<String> {
        use Write::*;
        let t = |x: &Timestamp| format_time(*x);
        match self {
            AddPerson {
                person_id: a,
                name,
                is_blocked,
            }
            | AddCompany {
                company_id: a,
                name,
                is_blocked,
            }
            | AddMedium {
                medium_id: a,
                medium_type: name,
                is_blocked,
            } => vec![a.to_string(), name.clone(), is_blocked.to_string()],
            AddPersonAccount {
                person_id: o,
                account_id,
                time,
                account_blocked,
                account_type,
            }
            | AddCompanyAccount {
                company_id: o,
                account_id,
                time,
                account_blocked,
                account_type,
            } => vec![
                o.to_string(),
                account_id.to_string(),
                t(time),
                account_blocked.to_string(),
                account_type.clone(),
            ],
            AddPersonLoan {
                person_id: o,
                loan_id,
                loan_amount,
                balance,
                time,
            }
            | AddCompanyLoan {
                company_id: o,
                loan_id,
                loan_amount,
                balance,
                time,
            } => vec![
                o.to_string(),
                loan_id.to_string(),
                loan_amount.to_string(),
                balance.to_string(),
                t(time),
            ],
            PersonInvest {
                person_id: a,
                company_id: b,
                time,
                ratio,
            }
            | CompanyInvest {
                company_id1: a,
                company_id2: b,
                time,
                ratio,
            } => vec![a.to_string(), b.to_string(), t(time), ratio.to_string()],
            PersonGuarantee {
                person_id1: a,
                person_id2: b,
                time,
            }
            | CompanyGuarantee {
                company_id1: a,
                company_id2: b,
                time,
            }
            | SignIn {
                medium_id: a,
                account_id: b,
                time,
            } => vec![a.to_string(), b.to_string(), t(time)],
            Transfer {
                account_id1: a,
                account_id2: b,
                time,
                amount,
            }
            | Withdraw {
                account_id1: a,
                account_id2: b,
                time,
                amount,
            }
            | Repay {
                account_id: a,
                loan_id: b,
                time,
                amount,
            }
            | Deposit {
                loan_id: a,
                account_id: b,
                time,
                amount,
            } => vec![a.to_string(), b.to_string(), t(time), amount.to_string()],
            DeleteAccount { account_id: a }
            | BlockAccount { account_id: a }
            | BlockPerson { person_id: a } => vec![a.to_string()],
        }
    }

    pub fn from_fields(number: u8, f: &[&str]) -> Result<Write> {
        use Write::*;
        let cols = write_columns(number)
            .ok_or_else(|| WorkloadError::Params(format!("unknown write TW{number}")))?;
        if f.len() != cols.len() {
            return Err(WorkloadError::Params(format!(
                "TW{number} expects {} fields, got {}",
                cols.len(),
                f.len()
            )));
        }
        Ok(match number {
            1 => AddPerson {
                person_id: id(f[0])?,
                name: f[1].to_owned(),
                is_blocked: flag(f[2])?,
            },
            2 => AddCompany {
                company_id: id(f[0])?,
                name: f[1].to_owned(),
                is_blocked: flag(f[2])?,
            },
            3 => AddMedium {
                medium_id: id(f[0])?,
                medium_type: f[1].to_owned(),
                is_blocked: flag(f[2])?,
            },
            4 => AddPersonAccount {
                person_id: id(f[0])?,
                account_id: id(f[1])?,
                time: parse_time(f[2])?,
                account_blocked: flag(f[3])?,
                account_type: f[4].to_owned(),
            },
            5 => AddCompanyAccount {
                company_id: id(f[0])?,
                account_id: id(f[1])?,
                time: parse_time(f[2])?,
                account_blocked: flag(f[3])?,
                account_type: f[4].to_owned(),
            },
            6 => AddPersonLoan {
                person_id: id(f[0])?,
                loan_id: id(f[1])?,
                loan_amount: money(f[2])?,
                balance: money(f[3])?,
                time: parse_time(f[4])?,
            },
            7 => AddCompanyLoan {
                company_id: id(f[0])?,
                loan_id: id(f[1])?,
                loan_amount: money(f[2])?,
                balance: money(f[3])?,
                time: parse_time(f[4])?,
            },
            8 => PersonInvest {
                person_id: id(f[0])?,
                company_id: id(f[1])?,
                time: parse_time(f[2])?,
                ratio: float(f[3])?,
            },
            9 => CompanyInvest {
                company_id1: id(f[0])?,
                company_id2: id(f[1])?,
                time: parse_time(f[2])?,
                ratio: float(f[3])?,
            },
            10 => PersonGuarantee {
                person_id1: id(f[0])?,
                person_id2: id(f[1])?,
                time: parse_time(f[2])?,
            },
            11 => CompanyGuarantee {
                company_id1: id(f[0])?,
                company_id2: id(f[1])?,
                time: parse_time(f[2])?,
            },
            12 => Transfer {
                account_id1: id(f[0])?,
                account_id2: id(f[1])?,
                time: parse_time(f[2])?,
                amount: money(f[3])?,
            },
            13 => Withdraw {
                account_id1: id(f[0])?,
                account_id2: id(f[1])?,
                time: parse_time(f[2])?,
                amount: money(f[3])?,
            },
            14 => Repay {
                account_id: id(f[0])?,
                loan_id: id(f[1])?,
                time: parse_time(f[2])?,
                amount: money(f[3])?,
            },
            15 => Deposit {
                loan_id: id(f[0])?,
                account_id: id(f[1])?,
                time: parse_time(f[2])?,
                amount: money(f[3])?,
            },
            16 => SignIn {
                medium_id: id(f[0])?,
                account_id: id(f[1])?,
                time: parse_time(f[2])?,
            },
            17 => DeleteAccount {
                account_id: id(f[0])?,
            },
            18 => BlockAccount {
                account_id: id(f[0])?,
            },
            _ => BlockPerson {
                person_id: id(f[0])?,
            },
        })
    }

    /// The simulation time of the event, if it carries one.
    pub fn time(&self) -> Option<Timestamp> {
        use Write::*;
        match self {
            AddPersonAccount { time, .. }
            | AddCompanyAccount { time, .. }
            | AddPersonLoan { time, .. }
            | AddCompanyLoan { time, .. }
            | PersonInvest { time, .. }
            | CompanyInvest { time, .. }
            | PersonGuarantee { time, .. }
            | CompanyGuarantee { time, .. }
            | Transfer { time, .. }
            | Withdraw { time, .. }
            | Repay { time, .. }
            | Deposit { time, .. }
            | SignIn { time, .. } => Some(*time),
            _ => None,
        }
    }
}

fn owner_vertex(kind: VertexKind, name: &str, id: u64, blocked: bool) -> VertexRecord {
    VertexRecord::new(kind, id)
        .with("name", name)
        .with("isBlocked", blocked)
}

fn account(id: u64, time: Timestamp, blocked: bool, ty: &str) -> VertexRecord {
    VertexRecord::new(VertexKind::Account, id)
        .with("createTime", time)
        .with("isBlocked", blocked)
        .with("type", ty)
}

fn loan(id: u64, amount: Money, balance: Money) -> VertexRecord {
    VertexRecord::new(VertexKind::Loan, id)
        .with("loanAmount", amount)
        .with("balance", balance)
}

impl Write {
    /// The vertices and edges an insert (TW1..TW16) adds; `None` for the
    /// delete and block operations.
    pub fn records(&self) -> Option<(Vec<VertexRecord>, Vec<EdgeRecord>)> {
        use EdgeKind as E;
        use VertexRef as V;
        use Write::*;
        let edge = |k, s, d, time: &Timestamp| EdgeRecord::new(k, s, d, *time);
        let money =
            |k, s, d, time: &Timestamp, amount: &Money| edge(k, s, d, time).with_amount(*amount);
        Some(match self {
            AddPerson {
                person_id,
                name,
                is_blocked,
            } => (
                vec![owner_vertex(
                    VertexKind::Person,
                    name,
                    *person_id,
                    *is_blocked,
                )],
                vec![],
            ),
            AddCompany {
                company_id,
                name,
                is_blocked,
            } => (
                vec![owner_vertex(
                    VertexKind::Company,
                    name,
                    *company_id,
                    *is_blocked,
                )],
                vec![],
            ),
            AddMedium {
                medium_id,
                medium_type,
                is_blocked,
            } => (
                vec![VertexRecord::new(VertexKind::Medium, *medium_id)
                    .with("type", medium_type.as_str())
                    .with("isBlocked", *is_blocked)],
                vec![],
            ),
            AddPersonAccount {
                person_id: o,
                account_id,
                time,
                account_blocked,
                account_type,
            }
            | AddCompanyAccount {
                company_id: o,
                account_id,
                time,
                account_blocked,
                account_type,
            } => {
                let owner = if matches!(self, AddPersonAccount { .. }) {
                    V::person(*o)
                } else {
                    V::company(*o)
                };
                (
                    vec![account(*account_id, *time, *account_blocked, account_type)],
                    vec![edge(E::Own, owner, V::account(*account_id), time)],
                )
            }
            AddPersonLoan {
                person_id: o,
                loan_id,
                loan_amount,
                balance,
                time,
            }
            | AddCompanyLoan {
                company_id: o,
                loan_id,
                loan_amount,
                balance,
                time,
            } => {
                let owner = if matches!(self, AddPersonLoan { .. }) {
                    V::person(*o)
                } else {
                    V::company(*o)
                };
                (
                    vec![loan(*loan_id, *loan_amount, *balance)],
                    vec![edge(E::Apply, owner, V::loan(*loan_id), time)],
                )
            }
            PersonInvest {
                person_id,
                company_id,
                time,
                ratio,
            } => (
                vec![],
                vec![edge(
                    E::Invest,
                    V::person(*person_id),
                    V::company(*company_id),
                    time,
                )
                .with("ratio", *ratio)],
            ),
            CompanyInvest {
                company_id1,
                company_id2,
                time,
                ratio,
            } => (
                vec![],
                vec![edge(
                    E::Invest,
                    V::company(*company_id1),
                    V::company(*company_id2),
                    time,
                )
                .with("ratio", *ratio)],
            ),
            PersonGuarantee {
                person_id1,
                person_id2,
                time,
            } => (
                vec![],
                vec![edge(
                    E::Guarantee,
                    V::person(*person_id1),
                    V::person(*person_id2),
                    time,
                )],
            ),
            CompanyGuarantee {
                company_id1,
                company_id2,
                time,
            } => (
                vec![],
                vec![edge(
                    E::Guarantee,
                    V::company(*company_id1),
                    V::company(*company_id2),
                    time,
                )],
            ),
            Transfer {
                account_id1,
                account_id2,
                time,
                amount,
            } => (
                vec![],
                vec![money(
                    E::Transfer,
                    V::account(*account_id1),
                    V::account(*account_id2),
                    time,
                    amount,
                )],
            ),
            Withdraw {
                account_id1,
                account_id2,
                time,
                amount,
            } => (
                vec![],
                vec![money(
                    E::Withdraw,
                    V::account(*account_id1),
                    V::account(*account_id2),
                    time,
                    amount,
                )],
            ),
            Repay {
                account_id,
                loan_id,
                time,
                amount,
            } => (
                vec![],
                vec![money(
                    E::Repay,
                    V::account(*account_id),
                    V::loan(*loan_id),
                    time,
                    amount,
                )],
            ),
            Deposit {
                loan_id,
                account_id,
                time,
                amount,
            } => (
                vec![],
                vec![money(
                    E::Deposit,
                    V::loan(*loan_id),
                    V::account(*account_id),
                    time,
                    amount,
                )],
            ),
            SignIn {
                medium_id,
                account_id,
                time,
            } => (
                vec![],
                vec![edge(
                    E::SignIn,
                    V::medium(*medium_id),
                    V::account(*account_id),
                    time,
                )],
            ),
            DeleteAccount { .. } | BlockAccount { .. } | BlockPerson { .. } => return None,
        })
    }
}

/// Applies one write inside `t`. TW17 returns what the cascade removed.
pub fn apply_write(t: &mut Txn, w: &Write) -> Result<Option<DeleteSummary>> {
    match w {
        Write::DeleteAccount { account_id } => {
            return Ok(Some(
                t.delete_vertex_cascade(VertexKind::Account, *account_id)?,
            ));
        }
        Write::BlockAccount { account_id } => {
            t.update_property(VertexRef::account(*account_id), "isBlocked", true)?;
        }
        Write::BlockPerson { person_id } => {
            t.update_property(VertexRef::person(*person_id), "isBlocked", true)?;
        }
        Write::Withdraw { account_id2, .. } => {
            let ty = t.get_property(VertexRef::account(*account_id2), "type")?;
            if ty.as_ref().and_then(|v| v.as_str()) != Some("card") {
                return Err(WorkloadError::NotCard(*account_id2));
            }
        }
        _ => {}
    }
    if let Some((vertices, edges)) = w.records() {
        for v in vertices {
            t.insert_vertex(v)?;
        }
        for e in edges {
            t.insert_edge(e)?;
        }
    }
    Ok(None)
}
