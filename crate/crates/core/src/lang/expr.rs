use std::collections::BTreeSet;
use std::fmt;

use super::path::{Dir, NodePath};
use super::token::{BinOp, Const, Func, TypeTag, UnOp, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(VarId),
    Const(Const),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{op}` expects {expected} operand, found {found}")]
pub struct TypeError {
    pub op: String,
    pub expected: TypeTag,
    pub found: TypeTag,
}

impl Expr {
    pub fn var(v: VarId) -> Expr {
        Expr::Var(v)
    }

    pub fn unary(op: UnOp, e: Expr) -> Expr {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    /// Result type, assuming the tree is well typed.
    pub fn ty(&self) -> TypeTag {
        match self {
            Expr::Var(v) => v.ty(),
            Expr::Const(c) => c.ty(),
            Expr::Unary(op, _) => op.ty(),
            Expr::Binary(op, _, _) => op.result_ty(),
            Expr::Call(f, _) => f.result_ty(),
        }
    }

    /// Full type check of the tree.
    pub fn check(&self) -> Result<TypeTag, TypeError> {
        let expect = |op: &dyn fmt::Display, e: &Expr, want: TypeTag| -> Result<(), TypeError> {
            let found = e.check()?;
            if found == want {
                Ok(())
            } else {
                Err(TypeError { op: op.to_string(), expected: want, found })
            }
        };
        match self {
            Expr::Var(_) | Expr::Const(_) => {}
            Expr::Unary(op, e) => expect(&op.token(), e, op.ty())?,
            Expr::Binary(op, l, r) => {
                let (lt, rt, _) = op.signature();
                expect(&op.token(), l, lt)?;
                expect(&op.token(), r, rt)?;
            }
            Expr::Call(f, args) => {
                // arity is enforced at construction by the parsers
                for (a, &want) in args.iter().zip(f.params()) {
                    expect(f, a, want)?;
                }
            }
        }
        Ok(self.ty())
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Expr::Var(_) | Expr::Const(_))
    }

    pub fn is_const(&self, c: Const) -> bool {
        matches!(self, Expr::Const(k) if *k == c)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().map(Expr::node_count).sum::<usize>()
    }

    /// Leaves have depth 1.
    pub fn depth(&self) -> usize {
        1 + self.children().map(Expr::depth).max().unwrap_or(0)
    }

    pub fn children(&self) -> impl Iterator<Item = &Expr> {
        let (a, b): (Option<&Expr>, Option<&Expr>) = match self {
            Expr::Var(_) | Expr::Const(_) => (None, None),
            Expr::Unary(_, e) => (Some(e), None),
            Expr::Binary(_, l, r) => (Some(l), Some(r)),
            Expr::Call(_, args) => (args.first(), args.get(1)),
        };
        a.into_iter().chain(b)
    }

    pub fn child(&self, dir: Dir) -> Option<&Expr> {
        match (self, dir) {
            (Expr::Unary(_, e), Dir::Left) => Some(e),
            (Expr::Binary(_, l, _), Dir::Left) => Some(l),
            (Expr::Binary(_, _, r), Dir::Right) => Some(r),
            (Expr::Call(_, args), Dir::Left) => args.first(),
            (Expr::Call(_, args), Dir::Right) => args.get(1),
            _ => None,
        }
    }

    pub fn child_mut(&mut self, dir: Dir) -> Option<&mut Expr> {
        match (self, dir) {
            (Expr::Unary(_, e), Dir::Left) => Some(e),
            (Expr::Binary(_, l, _), Dir::Left) => Some(l),
            (Expr::Binary(_, _, r), Dir::Right) => Some(r),
            (Expr::Call(_, args), Dir::Left) => args.first_mut(),
            (Expr::Call(_, args), Dir::Right) => args.get_mut(1),
            _ => None,
        }
    }

    pub fn at(&self, path: NodePath) -> Option<&Expr> {
        path.dirs().try_fold(self, |e, d| e.child(d))
    }

    pub fn at_mut(&mut self, path: NodePath) -> Option<&mut Expr> {
        path.dirs().try_fold(self, |e, d| e.child_mut(d))
    }

    /// Addresses of every node reachable with the path vocabulary, in preorder.
    pub fn paths(&self) -> Vec<NodePath> {
        fn walk(e: &Expr, p: NodePath, out: &mut Vec<NodePath>) {
            out.push(p);
            for d in [Dir::Left, Dir::Right] {
                if let (Some(c), Some(cp)) = (e.child(d), p.child(d)) {
                    walk(c, cp, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, NodePath::ROOT, &mut out);
        out
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Expr::Var(v) => {
                out.insert(*v);
            }
            _ => self.children().for_each(|c| c.collect_vars(out)),
        }
    }

    pub fn reads(&self, v: VarId) -> bool {
        match self {
            Expr::Var(w) => *w == v,
            _ => self.children().any(|c| c.reads(v)),
        }
    }

    pub fn count_calls(&self) -> usize {
        usize::from(matches!(self, Expr::Call(..))) + self.children().map(Expr::count_calls).sum::<usize>()
    }

    pub fn for_each_child_mut(&mut self, mut f: impl FnMut(&mut Expr)) {
        match self {
            Expr::Var(_) | Expr::Const(_) => {}
            Expr::Unary(_, e) => f(e),
            Expr::Binary(_, l, r) => {
                f(l);
                f(r);
            }
            Expr::Call(_, args) => args.iter_mut().for_each(f),
        }
    }

    /// Replaces every read of `v` by `with`; returns the number of replacements.
    pub fn substitute_var(&mut self, v: VarId, with: &Expr) -> usize {
        if let Expr::Var(w) = self {
            if *w == v {
                *self = with.clone();
                return 1;
            }
            return 0;
        }
        let mut n = 0;
        self.for_each_child_mut(|c| n += c.substitute_var(v, with));
        n
    }

    /// Replaces every maximal subtree equal to `pattern` with `with`.
    pub fn replace_subtree(&mut self, pattern: &Expr, with: &Expr) -> usize {
        if self == pattern {
            *self = with.clone();
            return 1;
        }
        let mut n = 0;
        self.for_each_child_mut(|c| n += c.replace_subtree(pattern, with));
        n
    }

    pub fn write_prefix(&self, out: &mut String) {
        match self {
            Expr::Var(v) => out.push_str(&v.to_string()),
            Expr::Const(c) => out.push_str(c.token()),
            Expr::Unary(op, e) => {
                out.push_str("( ");
                out.push_str(op.token());
                out.push(' ');
                e.write_prefix(out);
                out.push_str(" )");
            }
            Expr::Binary(op, l, r) => {
                out.push_str("( ");
                out.push_str(op.token());
                out.push(' ');
                l.write_prefix(out);
                out.push(' ');
                r.write_prefix(out);
                out.push_str(" )");
            }
            Expr::Call(f, args) => {
                out.push_str("( ");
                out.push_str(&f.to_string());
                for a in args {
                    out.push(' ');
                    a.write_prefix(out);
                }
                out.push_str(" )");
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_prefix(&mut s);
        f.write_str(&s)
    }
}
