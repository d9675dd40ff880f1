//! The small hand-checked graph used throughout the tests.
//!
//! Persons 1,2; company 1; accounts 1..4 (1,2 normal, 3 company, 4 card);
//! media 1 (blocked), 2; loans 1 (1000.00 / 400.00) and 2 (500.00 / 250.00).
//! Timestamps are raw milliseconds.

use finbench_core::{Money, Timestamp};
use finbench_engine::{
    EdgeKind, EdgeRecord, Engine, IsolationLevel, VertexKind, VertexRecord, VertexRef,
};

pub fn person(id: u64) -> VertexRecord {
    VertexRecord::new(VertexKind::Person, id)
        .with("name", format!("p{id}"))
        .with("isBlocked", false)
}

pub fn company(id: u64) -> VertexRecord {
    VertexRecord::new(VertexKind::Company, id)
        .with("name", format!("c{id}"))
        .with("isBlocked", false)
}

pub fn account(id: u64, ty: &str) -> VertexRecord {
    VertexRecord::new(VertexKind::Account, id)
        .with("createTime", Timestamp(1))
        .with("isBlocked", false)
        .with("type", ty)
}

pub fn medium(id: u64, blocked: bool) -> VertexRecord {
    VertexRecord::new(VertexKind::Medium, id)
        .with("type", "POS")
        .with("isBlocked", blocked)
}

pub fn loan(id: u64, amount: i64, balance: i64) -> VertexRecord {
    VertexRecord::new(VertexKind::Loan, id)
        .with("loanAmount", Money::units(amount))
        .with("balance", Money::units(balance))
}

pub fn edge(kind: EdgeKind, src: VertexRef, dst: VertexRef, t: i64) -> EdgeRecord {
    EdgeRecord::new(kind, src, dst, Timestamp(t))
}

pub fn money_edge(
    kind: EdgeKind,
    src: VertexRef,
    dst: VertexRef,
    t: i64,
    units: i64,
) -> EdgeRecord {
    edge(kind, src, dst, t).with_amount(Money::units(units))
}

pub fn transfer(src: u64, dst: u64, t: i64, units: i64) -> EdgeRecord {
    money_edge(
        EdgeKind::Transfer,
        VertexRef::account(src),
        VertexRef::account(dst),
        t,
        units,
    )
}

pub fn records() -> (Vec<VertexRecord>, Vec<EdgeRecord>) {
    use EdgeKind::*;
    let a = VertexRef::account;
    let p = VertexRef::person;
    let vertices = vec![
        person(1),
        person(2),
        company(1),
        account(1, "normal"),
        account(2, "normal"),
        account(3, "company"),
        account(4, "card"),
        medium(1, true),
        medium(2, false),
        loan(1, 1000, 400),
        loan(2, 500, 250),
    ];
    let edges = vec![
        edge(Own, p(1), a(1), 1),
        edge(Own, p(2), a(2), 1),
        edge(Own, VertexRef::company(1), a(3), 1),
        edge(Own, p(1), a(4), 1),
        edge(Apply, p(2), VertexRef::loan(1), 4),
        edge(Apply, p(1), VertexRef::loan(2), 3),
        edge(SignIn, VertexRef::medium(1), a(2), 90),
        edge(SignIn, VertexRef::medium(2), a(3), 95),
        transfer(1, 2, 10, 100),
        transfer(2, 3, 20, 50),
        transfer(3, 1, 30, 30),
        transfer(1, 3, 40, 20),
        money_edge(Withdraw, a(3), a(4), 50, 60),
        money_edge(Deposit, VertexRef::loan(1), a(2), 5, 400),
        money_edge(Deposit, VertexRef::loan(2), a(1), 3, 500),
        money_edge(Repay, a(2), VertexRef::loan(1), 60, 100),
        edge(Guarantee, p(1), p(2), 15),
        edge(Invest, p(1), VertexRef::company(1), 8).with("ratio", 0.3),
        edge(Invest, p(2), VertexRef::company(1), 9).with("ratio", 0.7),
    ];
    (vertices, edges)
}

pub fn load(iso: IsolationLevel, vertices: Vec<VertexRecord>, edges: Vec<EdgeRecord>) -> Engine {
    let e = Engine::volatile(iso);
    e.bulk_load(vertices, edges).expect("fixture loads");
    e
}

pub fn fx(iso: IsolationLevel) -> Engine {
    let (v, e) = records();
    load(iso, v, e)
}

/// The fixture plus two more transfers into account 3.
pub fn fx6(iso: IsolationLevel) -> Engine {
    let (v, mut e) = records();
    e.push(transfer(1, 3, 41, 25));
    e.push(transfer(2, 3, 42, 35));
    load(iso, v, e)
}
