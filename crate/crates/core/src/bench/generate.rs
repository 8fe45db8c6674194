//! Random instance generators. Every instance is a pure function of its
//! class (seed included) and index.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{BenchError, GraphColouringClass, HouseClass};
use crate::program::{Atom, Program, Rule, Term};

const GRAPH_TAG: u32 = 1;
const HOUSE_TAG: u32 = 2;

/// ChaCha8 keyed by all 32 seed bytes: base seed, generator tag, three
/// class parameters and the instance index.
fn instance_rng(seed: u64, tag: u32, params: [u32; 3], index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..12].copy_from_slice(&tag.to_le_bytes());
    for (k, p) in params.iter().enumerate() {
        key[12 + 4 * k..16 + 4 * k].copy_from_slice(&p.to_le_bytes());
    }
    key[24..].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn fact(name: &str, args: &[u64]) -> Rule {
    Rule::fact(Atom::new(
        name,
        args.iter().map(|&a| Term::int(a as i64)).collect(),
    ))
}

fn strict_order(rules: &mut Vec<Rule>, name: &str, n: u64) {
    for a in 1..=n {
        for b in a + 1..=n {
            rules.push(fact(name, &[a, b]));
        }
    }
}

/// Edges `(u, v)` with `1 <= u < v <= nodes`, drawn uniformly without
/// replacement and returned in ascending order.
pub fn gnm_edges(
    rng: &mut impl Rng,
    nodes: u32,
    edges: u32,
) -> Result<Vec<(u32, u32)>, BenchError> {
    let max = GraphColouringClass::max_edges(nodes);
    if u64::from(edges) > max {
        return Err(BenchError::TooManyEdges { nodes, edges, max });
    }
    let mut picked: Vec<usize> = index::sample(rng, max as usize, edges as usize).into_vec();
    picked.sort_unstable();
    let mut out = Vec::with_capacity(picked.len());
    let (mut u, mut row_start) = (1u32, 0usize);
    for k in picked {
        loop {
            let row_len = (nodes - u) as usize;
            if k < row_start + row_len {
                break;
            }
            row_start += row_len;
            u += 1;
        }
        out.push((u, u + 1 + (k - row_start) as u32));
    }
    Ok(out)
}

/// Facts `node/1`, `edge/2`, `colour/1`, plus `neq/2` over distinct colours.
pub fn gen_graph_colouring(cls: &GraphColouringClass, i: u64) -> Result<Program, BenchError> {
    cls.validate()?;
    let mut rng = instance_rng(cls.seed, GRAPH_TAG, [cls.v, cls.e, cls.c], i);
    let edges = gnm_edges(&mut rng, cls.v, cls.e)?;
    let mut rules = Vec::new();
    rules.extend((1..=u64::from(cls.v)).map(|n| fact("node", &[n])));
    rules.extend(
        edges
            .iter()
            .map(|&(u, v)| fact("edge", &[u64::from(u), u64::from(v)])),
    );
    rules.extend((1..=u64::from(cls.c)).map(|c| fact("colour", &[c])));
    for a in 1..=u64::from(cls.c) {
        for b in 1..=u64::from(cls.c) {
            if a != b {
                rules.push(fact("neq", &[a, b]));
            }
        }
    }
    Ok(Program::new(rules))
}

/// Drawn quantities of one house instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HouseDraw {
    pub persons: u32,
    /// Owner of thing `t` at position `t - 1`.
    pub owners: Vec<u32>,
    /// `(thing, cabinet)` for things that start in a cabinet.
    pub legacy: Vec<(u32, u32)>,
    pub long_things: Vec<u32>,
}

impl HouseDraw {
    pub fn t_long(&self) -> u32 {
        self.long_things.len() as u32
    }
}

pub fn draw_house(cls: &HouseClass, i: u64) -> Result<HouseDraw, BenchError> {
    cls.validate()?;
    let t = cls.t;
    let mut rng = instance_rng(cls.seed, HOUSE_TAG, [t, 0, 0], i);
    let persons = rng.random_range(2..=t / 2 + 1);
    let owners = (0..t).map(|_| rng.random_range(1..=persons)).collect();
    let mut legacy = Vec::new();
    for thing in 1..=t {
        if rng.random_bool(0.5) {
            legacy.push((thing, rng.random_range(1..=cls.cabinets())));
        }
    }
    let normal = Normal::new(0.0, f64::from(t)).expect("positive standard deviation");
    let n: f64 = normal.sample(&mut rng);
    let t_long = (n.round().abs() as u32).min(t);
    let mut long_things: Vec<u32> = index::sample(&mut rng, t as usize, t_long as usize)
        .into_iter()
        .map(|k| k as u32 + 1)
        .collect();
    long_things.sort_unstable();
    Ok(HouseDraw {
        persons,
        owners,
        legacy,
        long_things,
    })
}

/// Facts for the house encoding; see `encodings/house.lp` for the schema.
pub fn gen_house(cls: &HouseClass, i: u64) -> Result<Program, BenchError> {
    let d = draw_house(cls, i)?;
    let (t, p, k) = (
        u64::from(cls.t),
        u64::from(d.persons),
        u64::from(cls.cabinets()),
    );
    let mut rules = Vec::new();
    rules.extend((1..=t).map(|x| fact("thing", &[x])));
    rules.extend((1..=p).map(|x| fact("person", &[x])));
    rules.extend(
        d.owners
            .iter()
            .enumerate()
            .map(|(x, &o)| fact("ownedBy", &[x as u64 + 1, u64::from(o)])),
    );
    rules.extend(
        d.long_things
            .iter()
            .map(|&x| fact("longThing", &[u64::from(x)])),
    );
    rules.extend((1..=k).map(|x| fact("cabinet", &[x])));
    rules.extend((1..=k).map(|x| fact("room", &[x])));
    rules.extend(
        d.legacy
            .iter()
            .map(|&(x, c)| fact("legacyIn", &[u64::from(x), u64::from(c)])),
    );
    strict_order(&mut rules, "thingLess", t);
    strict_order(&mut rules, "cabinetLess", k);
    strict_order(&mut rules, "roomLess", k);
    strict_order(&mut rules, "personLess", p);
    Ok(Program::new(rules))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gc(v: u32, e: u32, c: u32) -> GraphColouringClass {
        GraphColouringClass {
            v,
            e,
            c,
            seed: 7,
            replicas: 11,
        }
    }

    fn count(p: &Program, name: &str) -> usize {
        p.rules
            .iter()
            .filter(|r| r.head.as_ref().is_some_and(|h| &*h.name == name))
            .count()
    }

    #[test]
    fn small_graph_counts() {
        let p = gen_graph_colouring(&gc(4, 3, 3), 0).unwrap();
        assert_eq!(count(&p, "node"), 4);
        assert_eq!(count(&p, "edge"), 3);
        assert_eq!(count(&p, "colour"), 3);
        assert_eq!(count(&p, "neq"), 6);
    }

    #[test]
    fn three_edges_on_three_nodes_is_a_triangle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            gnm_edges(&mut rng, 3, 3).unwrap(),
            vec![(1, 2), (1, 3), (2, 3)]
        );
    }

    #[test]
    fn too_many_edges() {
        assert!(gen_graph_colouring(&gc(3, 4, 3), 0).is_err());
    }

    #[test]
    fn deterministic_per_index() {
        let c = gc(20, 40, 3);
        let a = gen_graph_colouring(&c, 3).unwrap().to_string();
        assert_eq!(a, gen_graph_colouring(&c, 3).unwrap().to_string());
        assert_ne!(a, gen_graph_colouring(&c, 4).unwrap().to_string());
        let h = HouseClass {
            t: 10,
            seed: 1,
            replicas: 11,
        };
        assert_eq!(gen_house(&h, 2).unwrap(), gen_house(&h, 2).unwrap());
    }

    #[test]
    fn house_ranges() {
        for i in 0..200 {
            let cls = HouseClass {
                t: 5,
                seed: 3,
                replicas: 11,
            };
            let d = draw_house(&cls, i).unwrap();
            assert!((2..=3).contains(&d.persons));
            assert!(d.owners.iter().all(|&o| (1..=d.persons).contains(&o)));
            assert!(d.t_long() <= 5);
        }
        assert!(draw_house(
            &HouseClass {
                t: 1,
                seed: 0,
                replicas: 1
            },
            0
        )
        .is_err());
    }
}
