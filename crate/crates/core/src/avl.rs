//! Arena-backed AVL tree with `u32` keys.

use smallvec::SmallVec;

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Node<V> {
    key: u32,
    left: u32,
    right: u32,
    height: u8,
    value: V,
}

/// Ordered map from `u32` keys to values; no removal.
#[derive(Debug, Clone)]
pub struct AvlTree<V> {
    nodes: Vec<Node<V>>,
    root: u32,
}

impl<V> Default for AvlTree<V> {
    fn default() -> Self {
        Self::new()
    }
}

impl<V> AvlTree<V> {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            root: NIL,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn height(&self) -> usize {
        self.h(self.root) as usize
    }

    pub fn get(&self, key: u32) -> Option<&V> {
        let mut cur = self.root;
        while cur != NIL {
            let node = &self.nodes[cur as usize];
            cur = match key.cmp(&node.key) {
                std::cmp::Ordering::Less => node.left,
                std::cmp::Ordering::Greater => node.right,
                std::cmp::Ordering::Equal => return Some(&node.value),
            };
        }
        None
    }

    pub fn contains_key(&self, key: u32) -> bool {
        self.get(key).is_some()
    }

    /// Inserts `key`; hands `value` back if the key is already present.
    pub fn insert(&mut self, key: u32, value: V) -> Result<(), V> {
        let mut path: SmallVec<[u32; 64]> = SmallVec::new();
        let mut cur = self.root;
        while cur != NIL {
            path.push(cur);
            let node = &self.nodes[cur as usize];
            cur = match key.cmp(&node.key) {
                std::cmp::Ordering::Less => node.left,
                std::cmp::Ordering::Greater => node.right,
                std::cmp::Ordering::Equal => return Err(value),
            };
        }
        let fresh = self.nodes.len() as u32;
        self.nodes.push(Node {
            key,
            left: NIL,
            right: NIL,
            height: 1,
            value,
        });
        // Re-link bottom-up, rebalancing each ancestor.
        let mut child = fresh;
        while let Some(parent) = path.pop() {
            let p = &mut self.nodes[parent as usize];
            if key < p.key {
                p.left = child;
            } else {
                p.right = child;
            }
            child = self.rebalance(parent);
        }
        self.root = child;
        Ok(())
    }

    /// Keys and values in increasing key order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &V)> {
        let mut stack = Vec::new();
        let mut cur = self.root;
        std::iter::from_fn(move || {
            while cur != NIL {
                stack.push(cur);
                cur = self.nodes[cur as usize].left;
            }
            let top = stack.pop()?;
            let node = &self.nodes[top as usize];
            cur = node.right;
            Some((node.key, &node.value))
        })
    }

    /// Checks ordering, stored heights and the balance condition.
    pub fn validate(&self) -> Result<(), String> {
        fn walk<V>(t: &AvlTree<V>, i: u32, lo: Option<u32>, hi: Option<u32>) -> Result<u8, String> {
            if i == NIL {
                return Ok(0);
            }
            let n = &t.nodes[i as usize];
            if lo.is_some_and(|l| n.key <= l) || hi.is_some_and(|h| n.key >= h) {
                return Err(format!("key {} out of order", n.key));
            }
            let l = walk(t, n.left, lo, Some(n.key))?;
            let r = walk(t, n.right, Some(n.key), hi)?;
            if l.abs_diff(r) > 1 {
                return Err(format!("node {} unbalanced ({l}, {r})", n.key));
            }
            if n.height != l.max(r) + 1 {
                return Err(format!("node {} has stale height", n.key));
            }
            Ok(n.height)
        }
        walk(self, self.root, None, None).map(|_| ())
    }

    fn h(&self, i: u32) -> u8 {
        if i == NIL {
            0
        } else {
            self.nodes[i as usize].height
        }
    }

    fn update(&mut self, i: u32) {
        let n = &self.nodes[i as usize];
        let h = self.h(n.left).max(self.h(n.right)) + 1;
        self.nodes[i as usize].height = h;
    }

    fn balance(&self, i: u32) -> i16 {
        let n = &self.nodes[i as usize];
        self.h(n.left) as i16 - self.h(n.right) as i16
    }

    fn rotate_right(&mut self, i: u32) -> u32 {
        let l = self.nodes[i as usize].left;
        self.nodes[i as usize].left = self.nodes[l as usize].right;
        self.nodes[l as usize].right = i;
        self.update(i);
        self.update(l);
        l
    }

    fn rotate_left(&mut self, i: u32) -> u32 {
        let r = self.nodes[i as usize].right;
        self.nodes[i as usize].right = self.nodes[r as usize].left;
        self.nodes[r as usize].left = i;
        self.update(i);
        self.update(r);
        r
    }

    fn rebalance(&mut self, i: u32) -> u32 {
        self.update(i);
        let b = self.balance(i);
        if b > 1 {
            let l = self.nodes[i as usize].left;
            if self.balance(l) < 0 {
                self.nodes[i as usize].left = self.rotate_left(l);
            }
            return self.rotate_right(i);
        }
        if b < -1 {
            let r = self.nodes[i as usize].right;
            if self.balance(r) > 0 {
                self.nodes[i as usize].right = self.rotate_right(r);
            }
            return self.rotate_left(i);
        }
        i
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascending_inserts_stay_balanced() {
        let mut t = AvlTree::new();
        for k in 0..1000u32 {
            t.insert(k, k * 2).unwrap();
        }
        t.validate().unwrap();
        assert!(t.height() <= 15);
        assert_eq!(t.get(500), Some(&1000));
        assert_eq!(t.get(1000), None);
        assert_eq!(
            t.iter().map(|(k, _)| k).collect::<Vec<_>>(),
            (0..1000).collect::<Vec<_>>()
        );
    }

    #[test]
    fn duplicate_key_is_rejected() {
        let mut t = AvlTree::new();
        t.insert(5, "a").unwrap();
        assert_eq!(t.insert(5, "b"), Err("b"));
        assert_eq!(t.get(5), Some(&"a"));
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn scrambled_inserts() {
        let mut t = AvlTree::new();
        let mut x = 1u32;
        let mut keys = Vec::new();
        for _ in 0..5000 {
            x = x.wrapping_mul(1_103_515_245).wrapping_add(12345);
            let k = x >> 8;
            if t.insert(k, ()).is_ok() {
                keys.push(k);
            }
        }
        t.validate().unwrap();
        keys.sort_unstable();
        assert_eq!(t.iter().map(|(k, _)| k).collect::<Vec<_>>(), keys);
        assert!(keys.iter().all(|&k| t.contains_key(k)));
    }

    #[test]
    fn empty_tree() {
        let t: AvlTree<u8> = AvlTree::default();
        assert!(t.is_empty());
        assert_eq!(t.height(), 0);
        assert!(t.validate().is_ok());
        assert_eq!(t.iter().count(), 0);
    }
}
