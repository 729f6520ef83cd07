use std::fmt;
use std::str::FromStr;

/// Maximum number of direction letters after `N`; nodes at expression depth
/// 6 exist but have no address.
pub const MAX_PATH_LEN: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Left,
    Right,
}

/// Address of a node inside a statement's right-hand side: `N` is the root,
/// each following `l`/`r` descends into the left or right child.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodePath {
    len: u8,
    // bit i set => step i goes right
    bits: u8,
}

impl NodePath {
    pub const ROOT: NodePath = NodePath { len: 0, bits: 0 };

    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_root(self) -> bool {
        self.len == 0
    }

    /// Expression depth of the addressed node (root = 1).
    pub fn depth(self) -> usize {
        self.len as usize + 1
    }

    pub fn dir(self, i: usize) -> Dir {
        debug_assert!(i < self.len());
        if self.bits & (1 << i) != 0 {
            Dir::Right
        } else {
            Dir::Left
        }
    }

    pub fn dirs(self) -> impl Iterator<Item = Dir> {
        (0..self.len()).map(move |i| self.dir(i))
    }

    /// Extends the path by one step; `None` once the address vocabulary is
    /// exhausted.
    pub fn child(self, dir: Dir) -> Option<NodePath> {
        if self.len() >= MAX_PATH_LEN {
            return None;
        }
        let bits = match dir {
            Dir::Left => self.bits,
            Dir::Right => self.bits | (1 << self.len),
        };
        Some(NodePath { len: self.len + 1, bits })
    }

    pub fn from_dirs(dirs: &[Dir]) -> Option<NodePath> {
        dirs.iter().try_fold(NodePath::ROOT, |path, &dir| path.child(dir))
    }

    /// Every syntactically possible address, shortest first: 1 + 2 + 4 + 8 + 16.
    pub fn all() -> Vec<NodePath> {
        let mut out = vec![NodePath::ROOT];
        let mut i = 0;
        while i < out.len() {
            let p = out[i];
            for d in [Dir::Left, Dir::Right] {
                if let Some(c) = p.child(d) {
                    out.push(c);
                }
            }
            i += 1;
        }
        out
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("N")?;
        for d in self.dirs() {
            f.write_str(match d {
                Dir::Left => "l",
                Dir::Right => "r",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for NodePath {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rest = s.strip_prefix('N').ok_or(())?;
        let dirs: Vec<Dir> = rest
            .chars()
            .map(|c| match c {
                'l' => Ok(Dir::Left),
                'r' => Ok(Dir::Right),
                _ => Err(()),
            })
            .collect::<Result<_, _>>()?;
        NodePath::from_dirs(&dirs).ok_or(())
    }
}

impl PartialOrd for NodePath {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders addresses as a preorder walk visits them (`N`, `Nl`, `Nll`, ..., `Nr`).
impl Ord for NodePath {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.dirs().cmp(other.dirs())
    }
}
