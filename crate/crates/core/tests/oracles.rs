use bundle_pricing::baselines::{brev, srev};
use bundle_pricing::market::{
    enumerate_valuations, expected_revenue, Bundle, ItemDistribution, ProductDistribution, Valuation,
};
use bundle_pricing::oracles::{
    drev_bruteforce, least_utilities, mechanism_menu, mechanism_prices, min_utilities, rev_lp, AllocationMap,
    MinUtilities, UtilityAssignment,
};
use bundle_pricing::{Limits, Rational};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn limits() -> Limits {
    Limits { max_allocation_maps: 1 << 24, ..Limits::default() }
}

fn grid_of(d: &ProductDistribution<Rational>) -> (Vec<Valuation<Rational>>, Vec<Rational>) {
    enumerate_valuations(d, &limits()).unwrap().into_iter().unzip()
}

/// Every allocation map in search order: first valuation slowest, masks
/// from the grand bundle down. Returns the first optimum.
fn exhaustive(d: &ProductDistribution<Rational>) -> (Rational, Vec<Bundle>) {
    let (grid, probs) = grid_of(d);
    let choices = 1u32 << d.num_items();
    let total = (choices as u64).pow(grid.len() as u32);
    let mut best: Option<(Rational, Vec<Bundle>)> = None;
    for code in 0..total {
        let mut alloc = vec![Bundle::EMPTY; grid.len()];
        let mut c = code;
        for slot in alloc.iter_mut().rev() {
            *slot = Bundle(choices - 1 - (c % choices as u64) as u32);
            c /= choices as u64;
        }
        let Some(u) = least_utilities(&grid, &alloc) else { continue };
        let rev = grid
            .iter()
            .zip(&alloc)
            .zip(&u)
            .zip(&probs)
            .fold(Rational::zero(), |acc, (((v, &b), u), p)| acc + p * (v.bundle_value(b) - u));
        if best.as_ref().is_none_or(|(r, _)| rev > *r) {
            best = Some((rev, alloc));
        }
    }
    best.unwrap()
}

fn distribution() -> impl Strategy<Value = ProductDistribution<Rational>> {
    let splits = prop_oneof![
        Just(vec![q(1, 1)]),
        Just(vec![q(1, 2), q(1, 2)]),
        Just(vec![q(1, 4), q(3, 4)]),
        Just(vec![q(2, 3), q(1, 3)]),
        Just(vec![q(1, 4), q(1, 4), q(1, 2)]),
    ];
    let item = (splits, proptest::collection::vec(1i64..4, 3), 0i64..3).prop_map(|(probs, gaps, start)| {
        let mut v = start;
        let pairs = probs
            .into_iter()
            .zip(gaps)
            .map(|(p, g)| {
                let pt = (q(v, 1), p);
                v += g;
                pt
            })
            .collect();
        ItemDistribution::from_pairs(pairs).unwrap()
    });
    proptest::collection::vec(item, 1..=2)
        .prop_filter("at most 6 valuations for the exhaustive oracle", |items| {
            items.iter().map(|i| i.len()).product::<usize>() <= 6
        })
        .prop_map(|items| ProductDistribution::new(items).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn search_matches_exhaustive_enumeration(d in distribution()) {
        let r = drev_bruteforce(&d, &limits()).unwrap();
        let (rev, alloc) = exhaustive(&d);
        prop_assert_eq!(&r.revenue, &rev);
        prop_assert_eq!(&r.alloc.0, &alloc);
    }

    #[test]
    fn drev_sits_between_baselines_and_lp(d in distribution()) {
        let drev = drev_bruteforce(&d, &limits()).unwrap().revenue;
        prop_assert!(srev(&d).revenue <= drev);
        prop_assert!(brev(&d, &limits()).unwrap().revenue <= drev);
        prop_assert!(drev <= rev_lp(&d, &limits()).unwrap());
    }

    #[test]
    fn witness_is_an_ic_ir_mechanism(d in distribution()) {
        let r = drev_bruteforce(&d, &limits()).unwrap();
        let (grid, _) = grid_of(&d);
        let prices = mechanism_prices(&grid, &r.alloc, &r.utilities);
        for (v, val) in grid.iter().enumerate() {
            let own = val.bundle_value(r.alloc.0[v]) - &prices[v];
            prop_assert!(!own.is_negative());
            for w in 0..grid.len() {
                prop_assert!(own >= val.bundle_value(r.alloc.0[w]) - &prices[w]);
            }
        }
        let menu = mechanism_menu(&grid, &r.alloc, &r.utilities).expect("witness prices form a menu");
        prop_assert_eq!(expected_revenue(&menu, &d, &limits()).unwrap(), r.revenue);
    }

    #[test]
    fn least_utilities_are_tight(d in distribution(), seed in any::<u64>()) {
        let (grid, _) = grid_of(&d);
        let choices = 1u64 << d.num_items();
        let mut s = seed;
        let alloc: Vec<Bundle> = grid.iter().map(|_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            Bundle(((s >> 33) % choices) as u32)
        }).collect();
        let MinUtilities::Feasible(UtilityAssignment(u)) =
            min_utilities(&d, &AllocationMap(alloc.clone()), &limits()).unwrap() else { return Ok(()); };
        let weight = |v: usize, w: usize| -> Rational {
            alloc[v].items().fold(Rational::zero(), |acc, i| acc + &grid[w].0[i] - &grid[v].0[i])
        };
        for w in 0..grid.len() {
            prop_assert!(!u[w].is_negative());
            for v in 0..grid.len() {
                if v != w {
                    prop_assert!(u[w] >= &u[v] + weight(v, w));
                }
            }
        }
        // Walking tight edges backwards from any valuation reaches utility zero.
        for start in 0..grid.len() {
            let mut seen = vec![false; grid.len()];
            let mut stack = vec![start];
            let mut reached = false;
            while let Some(w) = stack.pop() {
                if seen[w] { continue; }
                seen[w] = true;
                if u[w].is_zero() { reached = true; break; }
                for v in 0..grid.len() {
                    if v != w && u[w] == &u[v] + weight(v, w) { stack.push(v); }
                }
            }
            prop_assert!(reached, "valuation {} has no tight path to zero", start);
        }
    }
}

#[test]
fn single_item_feasible_maps_are_upward_closed() {
    let d = ProductDistribution::new(vec![
        ItemDistribution::from_pairs(vec![(q(1, 1), q(1, 4)), (q(2, 1), q(1, 4)), (q(4, 1), q(1, 4)), (q(5, 1), q(1, 4))])
            .unwrap(),
    ])
    .unwrap();
    let (grid, _) = grid_of(&d);
    for code in 0u32..16 {
        let alloc: Vec<Bundle> = (0..4).map(|i| Bundle(code >> i & 1)).collect();
        let feasible = least_utilities(&grid, &alloc).is_some();
        let upward = alloc.windows(2).all(|w| w[0].0 <= w[1].0);
        assert_eq!(feasible, upward, "allocation {code:04b}");
    }
}

#[test]
fn three_item_drev_agrees_with_small_checks() {
    let item = ItemDistribution::two_point(q(1, 1), q(3, 1), q(1, 4)).unwrap();
    let d = ProductDistribution::iid(3, item).unwrap();
    let r = drev_bruteforce(&d, &limits()).unwrap();
    assert!(r.revenue <= rev_lp(&d, &limits()).unwrap());
    assert!(r.revenue >= brev(&d, &limits()).unwrap().revenue);
}
