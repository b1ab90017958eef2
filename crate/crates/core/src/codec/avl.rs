//! AVL tree keyed by multiplicity, storing prevalences.
//!
//! Every node visited by a lookup, insertion or deletion bumps a probe
//! counter, which gives a deterministic per-update cost measurement.

use std::cmp::Ordering;

type Link = Option<Box<Node>>;

#[derive(Debug, Clone)]
struct Node {
    key: u64,
    val: u64,
    height: u32,
    left: Link,
    right: Link,
}

fn height(l: &Link) -> u32 {
    l.as_ref().map_or(0, |n| n.height)
}

impl Node {
    fn leaf(key: u64, val: u64) -> Box<Node> {
        Box::new(Node {
            key,
            val,
            height: 1,
            left: None,
            right: None,
        })
    }

    fn update(&mut self) {
        self.height = 1 + height(&self.left).max(height(&self.right));
    }

    fn balance(&self) -> i64 {
        height(&self.left) as i64 - height(&self.right) as i64
    }
}

fn rotate_right(mut n: Box<Node>) -> Box<Node> {
    let mut l = n.left.take().expect("left child for right rotation");
    n.left = l.right.take();
    n.update();
    l.right = Some(n);
    l.update();
    l
}

fn rotate_left(mut n: Box<Node>) -> Box<Node> {
    let mut r = n.right.take().expect("right child for left rotation");
    n.right = r.left.take();
    n.update();
    r.left = Some(n);
    r.update();
    r
}

fn rebalance(mut n: Box<Node>) -> Box<Node> {
    n.update();
    let b = n.balance();
    if b > 1 {
        if n.left.as_ref().is_some_and(|l| l.balance() < 0) {
            n.left = n.left.take().map(rotate_left);
        }
        rotate_right(n)
    } else if b < -1 {
        if n.right.as_ref().is_some_and(|r| r.balance() > 0) {
            n.right = n.right.take().map(rotate_right);
        }
        rotate_left(n)
    } else {
        n
    }
}

/// Returns the new subtree and whether a node was created.
fn insert_add(link: Link, key: u64, add: u64, probes: &mut u64) -> (Box<Node>, bool) {
    let Some(mut n) = link else {
        return (Node::leaf(key, add), true);
    };
    *probes += 1;
    let created;
    match key.cmp(&n.key) {
        Ordering::Equal => {
            n.val += add;
            return (n, false);
        }
        Ordering::Less => {
            let (l, c) = insert_add(n.left.take(), key, add, probes);
            n.left = Some(l);
            created = c;
        }
        Ordering::Greater => {
            let (r, c) = insert_add(n.right.take(), key, add, probes);
            n.right = Some(r);
            created = c;
        }
    }
    (rebalance(n), created)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dec {
    Absent,
    Decremented,
    Removed,
}

fn take_min(mut n: Box<Node>, probes: &mut u64) -> (Link, Box<Node>) {
    *probes += 1;
    match n.left.take() {
        None => (n.right.take(), n),
        Some(l) => {
            let (rest, min) = take_min(l, probes);
            n.left = rest;
            (Some(rebalance(n)), min)
        }
    }
}

fn decrement(link: Link, key: u64, probes: &mut u64) -> (Link, Dec) {
    let Some(mut n) = link else {
        return (None, Dec::Absent);
    };
    *probes += 1;
    let found;
    match key.cmp(&n.key) {
        Ordering::Less => {
            let (l, f) = decrement(n.left.take(), key, probes);
            n.left = l;
            found = f;
        }
        Ordering::Greater => {
            let (r, f) = decrement(n.right.take(), key, probes);
            n.right = r;
            found = f;
        }
        Ordering::Equal => {
            if n.val > 1 {
                n.val -= 1;
                return (Some(n), Dec::Decremented);
            }
            let replacement = match (n.left.take(), n.right.take()) {
                (None, None) => None,
                (Some(c), None) | (None, Some(c)) => Some(c),
                (Some(l), Some(r)) => {
                    let (rest, mut min) = take_min(r, probes);
                    min.left = Some(l);
                    min.right = rest;
                    Some(rebalance(min))
                }
            };
            return (replacement, Dec::Removed);
        }
    }
    (Some(rebalance(n)), found)
}

/// Ordered map `u64 → u64` with counted node probes.
#[derive(Debug, Clone, Default)]
pub struct ProbeTree {
    root: Link,
    len: usize,
    probes: u64,
}

impl ProbeTree {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn height(&self) -> u32 {
        height(&self.root)
    }

    /// Total nodes visited since creation.
    pub fn probes(&self) -> u64 {
        self.probes
    }

    pub fn get(&mut self, key: u64) -> Option<u64> {
        let mut cur = &self.root;
        while let Some(n) = cur {
            self.probes += 1;
            match key.cmp(&n.key) {
                Ordering::Equal => return Some(n.val),
                Ordering::Less => cur = &n.left,
                Ordering::Greater => cur = &n.right,
            }
        }
        None
    }

    pub fn contains(&mut self, key: u64) -> bool {
        self.get(key).is_some()
    }

    /// `T(key) += 1`, inserting `(key, 1)` when absent.
    pub fn increment(&mut self, key: u64) {
        let (root, created) = insert_add(self.root.take(), key, 1, &mut self.probes);
        self.root = Some(root);
        if created {
            self.len += 1;
        }
    }

    /// `T(key) −= 1`, deleting the node when it reaches zero. False if `key` is absent.
    pub fn decrement(&mut self, key: u64) -> bool {
        let (root, outcome) = decrement(self.root.take(), key, &mut self.probes);
        self.root = root;
        if outcome == Dec::Removed {
            self.len -= 1;
        }
        outcome != Dec::Absent
    }

    /// In-order `(key, value)` pairs.
    pub fn to_vec(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::with_capacity(self.len);
        let mut stack: Vec<&Node> = Vec::new();
        let mut cur = self.root.as_deref();
        loop {
            while let Some(n) = cur {
                stack.push(n);
                cur = n.left.as_deref();
            }
            let Some(n) = stack.pop() else { break };
            out.push((n.key, n.val));
            cur = n.right.as_deref();
        }
        out
    }

    #[cfg(test)]
    fn check(&self) {
        fn walk(l: &Link, lo: Option<u64>, hi: Option<u64>) -> (u32, usize) {
            let Some(n) = l else { return (0, 0) };
            assert!(lo.is_none_or(|lo| n.key > lo) && hi.is_none_or(|hi| n.key < hi));
            assert!(n.val > 0);
            let (hl, cl) = walk(&n.left, lo, Some(n.key));
            let (hr, cr) = walk(&n.right, Some(n.key), hi);
            assert!(hl.abs_diff(hr) <= 1, "unbalanced at {}", n.key);
            assert_eq!(n.height, 1 + hl.max(hr));
            (n.height, cl + cr + 1)
        }
        let (_, count) = walk(&self.root, None, None);
        assert_eq!(count, self.len);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    #[test]
    fn sequential_keys_stay_balanced() {
        let mut t = ProbeTree::new();
        for k in 0..1000 {
            t.increment(k);
        }
        t.check();
        assert_eq!(t.len(), 1000);
        // AVL height ≤ 1.44 log₂(n + 2)
        assert!(t.height() <= 15);
        for k in (0..1000).step_by(2) {
            assert!(t.decrement(k));
        }
        t.check();
        assert_eq!(t.len(), 500);
        assert!(!t.decrement(0));
    }

    proptest! {
        #[test]
        fn matches_btreemap(ops in prop::collection::vec((0u64..40, any::<bool>()), 0..400)) {
            let mut t = ProbeTree::new();
            let mut m: BTreeMap<u64, u64> = BTreeMap::new();
            for (k, inc) in ops {
                if inc {
                    t.increment(k);
                    *m.entry(k).or_insert(0) += 1;
                } else {
                    let present = m.contains_key(&k);
                    prop_assert_eq!(t.decrement(k), present);
                    if present {
                        let v = m.get_mut(&k).unwrap();
                        *v -= 1;
                        if *v == 0 {
                            m.remove(&k);
                        }
                    }
                }
                t.check();
            }
            prop_assert_eq!(t.to_vec(), m.into_iter().collect::<Vec<_>>());
        }
    }
}
