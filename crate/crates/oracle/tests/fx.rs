//! The oracle on the shared fixture. These are the values frozen into the
//! workload tests.

use finbench_oracle::{Edge, Graph, Kind, Node, SENTINEL};

use Node::{Account as A, Company as C, Loan as L, Medium as M, Person as P};

fn e(kind: Kind, src: Node, dst: Node, ts: i64, units: i64) -> Edge {
    Edge {
        kind,
        src,
        dst,
        ts,
        cents: units * 100,
    }
}

fn fx() -> Graph {
    use Kind::*;
    let mut g = Graph::default();
    g.blocked.insert(M(1));
    g.medium_type.insert(1, "POS".into());
    g.medium_type.insert(2, "POS".into());
    g.loans.insert(1, (100_000, 40_000));
    g.loans.insert(2, (50_000, 25_000));
    g.edges = vec![
        e(Own, P(1), A(1), 1, 0),
        e(Own, P(2), A(2), 1, 0),
        e(Own, C(1), A(3), 1, 0),
        e(Own, P(1), A(4), 1, 0),
        e(Apply, P(2), L(1), 4, 0),
        e(Apply, P(1), L(2), 3, 0),
        e(SignIn, M(1), A(2), 90, 0),
        e(SignIn, M(2), A(3), 95, 0),
        e(Transfer, A(1), A(2), 10, 100),
        e(Transfer, A(2), A(3), 20, 50),
        e(Transfer, A(3), A(1), 30, 30),
        e(Transfer, A(1), A(3), 40, 20),
        e(Withdraw, A(3), A(4), 50, 60),
        e(Deposit, L(1), A(2), 5, 400),
        e(Deposit, L(2), A(1), 3, 500),
        e(Repay, A(2), L(1), 60, 100),
        e(Guarantee, P(1), P(2), 15, 0),
        e(Invest, P(1), C(1), 8, 0),
        e(Invest, P(2), C(1), 9, 0),
    ];
    g
}

const W: (i64, i64) = (0, 1000);

#[test]
fn fixture_answers() {
    let g = fx();
    assert_eq!(g.tcr1(1, W), vec![(2, 1, 1, "POS".to_string())]);
    assert!(g.tcr1(4, W).is_empty());
    assert!(g.tcr1(1, (0, 10)).is_empty());

    assert_eq!(g.tcr2(2, W), vec![(1, 50_000, 25_000)]);
    assert_eq!(g.tcr2(1, W), vec![(2, 100_000, 40_000)]);

    assert_eq!(g.tcr3(1, 3, W), 1);
    assert_eq!(g.tcr3(4, 1, W), -1);
    assert_eq!(g.tcr3(2, 1, W), 2);

    assert_eq!(g.tcr4(1, 2, W), vec![(3, 1, 5000, 5000, 1, 3000, 3000)]);
    assert!(g.tcr4(2, 1, W).is_empty());
    assert!(g.tcr4(1, 3, W).is_empty());

    assert_eq!(g.tcr5(1, W), vec![vec![1, 2, 3], vec![1, 2], vec![1, 3]]);
    assert_eq!(g.tcr5(2, W), vec![vec![2, 3, 1], vec![2, 3]]);

    assert!(g.tcr6(4, 10_000, 10_000, W).is_empty());

    assert_eq!(g.tcr7(3, 10_000, W), (2, 1, 2333));
    assert_eq!(g.tcr7(4, 0, W), (0, 0, SENTINEL));
    assert_eq!(g.tcr7(2, 60_000, W), (1, 0, SENTINEL));

    assert_eq!(g.tcr8(1, 0, (15, 25)), vec![(3, 50, 1)]);
    assert!(g.tcr8(1, 10_000, W).is_empty());
    assert_eq!(g.tcr8(1, 0, W), vec![(4, 60, 2), (1, 30, 2), (3, 70, 1)]);

    assert_eq!(g.tcr9(2, 0, W), (4000, 8000, 2000));
    assert_eq!(g.tcr9(4, 0, W), (SENTINEL, SENTINEL, SENTINEL));
    assert_eq!(g.tcr9(2, 500_000, W), (SENTINEL, SENTINEL, SENTINEL));

    assert_eq!(g.tcr10(1, 2, W), 1000);
    assert_eq!(g.tcr10(1, 2, (0, 9)), 0);

    assert_eq!(g.tcr11(1, W), (100_000, 1));
    assert_eq!(g.tcr11(2, W), (0, 0));

    assert_eq!(g.tcr12(1, W), vec![(3, 2000)]);
    assert_eq!(g.tcr12(2, W), vec![(3, 5000)]);

    assert_eq!(g.tsr2(2, W), (5000, Some(5000), 1, 10_000, Some(10_000), 1));
    assert_eq!(g.tsr3(2, 0, W), 0);
    assert_eq!(g.tsr45(1, 0, W, true), vec![(2, 1, 10_000), (3, 1, 2000)]);
    assert!(g.tsr6(2, W).is_empty());
}

#[test]
fn fixture_variants() {
    let mut g = fx();
    g.edges.push(e(Kind::Transfer, A(1), A(3), 41, 25));
    g.edges.push(e(Kind::Transfer, A(2), A(3), 42, 35));
    assert_eq!(g.tcr6(4, 10_000, 10_000, W), vec![(3, 13_000, 6000)]);

    let mut g = fx();
    g.blocked.insert(A(1));
    assert_eq!(g.tsr3(2, 0, W), 1000);

    let mut g = fx();
    g.edges.push(e(Kind::Guarantee, P(2), P(1), 16, 0));
    assert_eq!(g.tcr11(1, W), (100_000, 1));
    assert_eq!(g.tcr11(2, W), (50_000, 1));
}
