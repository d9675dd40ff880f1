use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use finbench_core::{Date, EntityId, Money, Timestamp};
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VertexKind {
    Person,
    Company,
    Account,
    Loan,
    Medium,
}

impl VertexKind {
    pub const ALL: [VertexKind; 5] = [
        VertexKind::Person,
        VertexKind::Company,
        VertexKind::Account,
        VertexKind::Loan,
        VertexKind::Medium,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            VertexKind::Person => "Person",
            VertexKind::Company => "Company",
            VertexKind::Account => "Account",
            VertexKind::Loan => "Loan",
            VertexKind::Medium => "Medium",
        }
    }

    /// Attributes every stored vertex of this kind must carry.
    ///
    /// This is the subset the insert writes always supply; the remaining
    /// attributes of the entity tables are optional.
    pub fn mandatory(self) -> &'static [&'static str] {
        match self {
            VertexKind::Person | VertexKind::Company => &["name", "isBlocked"],
            VertexKind::Account => &["createTime", "isBlocked", "type"],
            VertexKind::Loan => &["loanAmount", "balance"],
            VertexKind::Medium => &["type", "isBlocked"],
        }
    }

    /// Every attribute in the entity table, in table order.
    pub fn attributes(self) -> &'static [&'static str] {
        match self {
            VertexKind::Person => &[
                "name",
                "isBlocked",
                "createTime",
                "gender",
                "birthday",
                "country",
                "city",
            ],
            VertexKind::Company => &[
                "name",
                "isBlocked",
                "createTime",
                "country",
                "city",
                "business",
                "description",
                "url",
            ],
            VertexKind::Account => &[
                "createTime",
                "isBlocked",
                "type",
                "nickname",
                "phoneNumber",
                "email",
                "freqLoginType",
                "lastLoginTime",
                "accountLevel",
            ],
            VertexKind::Loan => &["loanAmount", "balance", "usage", "interestRate"],
            VertexKind::Medium => &[
                "type",
                "createTime",
                "isBlocked",
                "lastLoginTime",
                "riskLevel",
            ],
        }
    }
}

impl fmt::Display for VertexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VertexKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        VertexKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown vertex kind {s}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    Transfer,
    Withdraw,
    Deposit,
    Repay,
    SignIn,
    Invest,
    Apply,
    Guarantee,
    Own,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 9] = [
        EdgeKind::Transfer,
        EdgeKind::Withdraw,
        EdgeKind::Deposit,
        EdgeKind::Repay,
        EdgeKind::SignIn,
        EdgeKind::Invest,
        EdgeKind::Apply,
        EdgeKind::Guarantee,
        EdgeKind::Own,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            EdgeKind::Transfer => "transfer",
            EdgeKind::Withdraw => "withdraw",
            EdgeKind::Deposit => "deposit",
            EdgeKind::Repay => "repay",
            EdgeKind::SignIn => "signIn",
            EdgeKind::Invest => "invest",
            EdgeKind::Apply => "apply",
            EdgeKind::Guarantee => "guarantee",
            EdgeKind::Own => "own",
        }
    }

    pub fn sources(self) -> &'static [VertexKind] {
        use VertexKind::*;
        match self {
            EdgeKind::Transfer | EdgeKind::Withdraw | EdgeKind::Repay => &[Account],
            EdgeKind::Deposit => &[Loan],
            EdgeKind::SignIn => &[Medium],
            EdgeKind::Invest | EdgeKind::Apply | EdgeKind::Guarantee | EdgeKind::Own => {
                &[Person, Company]
            }
        }
    }

    pub fn targets(self) -> &'static [VertexKind] {
        use VertexKind::*;
        match self {
            EdgeKind::Transfer | EdgeKind::Withdraw | EdgeKind::Deposit | EdgeKind::SignIn => {
                &[Account]
            }
            EdgeKind::Own => &[Account],
            EdgeKind::Repay | EdgeKind::Apply => &[Loan],
            EdgeKind::Invest => &[Company],
            EdgeKind::Guarantee => &[Person, Company],
        }
    }

    /// At most one edge per ordered (src, dst) pair.
    pub fn single_per_pair(self) -> bool {
        matches!(
            self,
            EdgeKind::Own | EdgeKind::Invest | EdgeKind::Guarantee | EdgeKind::Apply
        )
    }

    /// At most one in-edge per target vertex.
    pub fn single_in_edge(self) -> bool {
        matches!(self, EdgeKind::Own | EdgeKind::Apply)
    }

    pub fn has_amount(self) -> bool {
        matches!(
            self,
            EdgeKind::Transfer | EdgeKind::Withdraw | EdgeKind::Deposit | EdgeKind::Repay
        )
    }

    pub fn touches(self, kind: VertexKind) -> bool {
        self.sources().contains(&kind) || self.targets().contains(&kind)
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EdgeKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        EdgeKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown edge kind {s}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    Out,
    In,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Out => Direction::In,
            Direction::In => Direction::Out,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexRef {
    pub kind: VertexKind,
    pub id: EntityId,
}

impl VertexRef {
    pub fn new(kind: VertexKind, id: impl Into<EntityId>) -> Self {
        VertexRef {
            kind,
            id: id.into(),
        }
    }
    pub fn account(id: u64) -> Self {
        VertexRef::new(VertexKind::Account, id)
    }
    pub fn person(id: u64) -> Self {
        VertexRef::new(VertexKind::Person, id)
    }
    pub fn company(id: u64) -> Self {
        VertexRef::new(VertexKind::Company, id)
    }
    pub fn loan(id: u64) -> Self {
        VertexRef::new(VertexKind::Loan, id)
    }
    pub fn medium(id: u64) -> Self {
        VertexRef::new(VertexKind::Medium, id)
    }
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind, self.id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Float(f64),
    Money(Money),
    Str(String),
    DateTime(Timestamp),
    Date(Date),
    IntList(Vec<i64>),
}

impl Value {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(v) => Some(*v),
            _ => None,
        }
    }
    pub fn as_float(&self) -> Option<f64> {
        match self {
            Value::Float(v) => Some(*v),
            _ => None,
        }
    }
    pub fn as_money(&self) -> Option<Money> {
        match self {
            Value::Money(m) => Some(*m),
            _ => None,
        }
    }
    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }
    pub fn as_datetime(&self) -> Option<Timestamp> {
        match self {
            Value::DateTime(t) => Some(*t),
            _ => None,
        }
    }
    pub fn as_date(&self) -> Option<Date> {
        match self {
            Value::Date(d) => Some(*d),
            _ => None,
        }
    }
    pub fn as_int_list(&self) -> Option<&[i64]> {
        match self {
            Value::IntList(v) => Some(v),
            _ => None,
        }
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}
impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}
impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}
impl From<Money> for Value {
    fn from(v: Money) -> Self {
        Value::Money(v)
    }
}
impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_owned())
    }
}
impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Str(v)
    }
}
impl From<Timestamp> for Value {
    fn from(v: Timestamp) -> Self {
        Value::DateTime(v)
    }
}
impl From<Date> for Value {
    fn from(v: Date) -> Self {
        Value::Date(v)
    }
}
impl From<Vec<i64>> for Value {
    fn from(v: Vec<i64>) -> Self {
        Value::IntList(v)
    }
}

pub type Props = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub kind: VertexKind,
    pub id: EntityId,
    pub props: Props,
}

impl VertexRecord {
    pub fn new(kind: VertexKind, id: impl Into<EntityId>) -> Self {
        VertexRecord {
            kind,
            id: id.into(),
            props: Props::new(),
        }
    }

    pub fn with(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.props.insert(name.to_owned(), value.into());
        self
    }

    pub fn vref(&self) -> VertexRef {
        VertexRef {
            kind: self.kind,
            id: self.id,
        }
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.props.get(name)
    }

    pub fn is_blocked(&self) -> bool {
        self.get("isBlocked")
            .and_then(Value::as_bool)
            .unwrap_or(false)
    }

    pub fn validate(&self) -> Result<()> {
        for attr in self.kind.mandatory() {
            match self.props.get(*attr) {
                None => {
                    return Err(EngineError::MissingAttribute {
                        kind: self.kind,
                        id: self.id.0,
                        attr,
                    })
                }
                Some(v) => check_type(attr, v)?,
            }
        }
        for (name, v) in &self.props {
            check_type(name, v)?;
        }
        Ok(())
    }
}

pub(crate) fn check_type(name: &str, v: &Value) -> Result<()> {
    let ok = match name {
        "isBlocked" => matches!(v, Value::Bool(_)),
        "createTime" | "lastLoginTime" => matches!(v, Value::DateTime(_)),
        "loanAmount" | "amount" => matches!(v, Value::Money(_)),
        "birthday" => matches!(v, Value::Date(_)),
        _ => true,
    };
    if ok {
        Ok(())
    } else {
        Err(EngineError::AttributeType {
            attr: name.to_owned(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub kind: EdgeKind,
    /// Assigned by the engine on insert; ignored on input.
    pub edge_id: EntityId,
    pub src: VertexRef,
    pub dst: VertexRef,
    pub timestamp: Timestamp,
    pub props: Props,
}

impl EdgeRecord {
    pub fn new(kind: EdgeKind, src: VertexRef, dst: VertexRef, timestamp: Timestamp) -> Self {
        EdgeRecord {
            kind,
            edge_id: EntityId(0),
            src,
            dst,
            timestamp,
            props: Props::new(),
        }
    }

    pub fn with(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.props.insert(name.to_owned(), value.into());
        self
    }

    pub fn with_amount(self, amount: Money) -> Self {
        self.with("amount", amount)
    }

    pub fn amount(&self) -> Money {
        self.props
            .get("amount")
            .and_then(Value::as_money)
            .unwrap_or(Money::ZERO)
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.props.get(name)
    }

    /// The endpoint on the far side when walking in direction `dir`.
    pub fn other(&self, dir: Direction) -> VertexRef {
        match dir {
            Direction::Out => self.dst,
            Direction::In => self.src,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.kind.sources().contains(&self.src.kind)
            || !self.kind.targets().contains(&self.dst.kind)
        {
            return Err(EngineError::EndpointKind {
                kind: self.kind,
                src: self.src.kind,
                dst: self.dst.kind,
            });
        }
        if self.kind.has_amount() && !self.props.contains_key("amount") {
            return Err(EngineError::AttributeType {
                attr: "amount".into(),
            });
        }
        for (name, v) in &self.props {
            check_type(name, v)?;
        }
        Ok(())
    }
}
