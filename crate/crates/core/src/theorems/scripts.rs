//! Query scripts behind each claim, in the command language of
//! [`crate::logic::QueryScript`].

use super::Target;

const TM4: &str = "def tm4 \"0->0110 1->1001\":\npromote TM4 tm4:\n";
const TM16: &str =
    "morphism tm16 \"0->0110100110010110 1->1001011001101001\":\npromote TM16 tm16:\n";

/// Totality, uniqueness, the values at 0 and 1, and the two induction steps
/// `h(n+1) = h(n) +- 1` for `n >= 1`.
pub fn verification(t: Target) -> String {
    let name = t.name();
    let p = t.prefix();
    let [ns, ys] = t.signature().map(|s| s.tag());
    let (setup, seq) = match t {
        Target::F30 | Target::Mf31 | Target::Mf32 => (TM4, "TM4"),
        Target::F50 | Target::F51 => (TM16, "TM16"),
        Target::G30 => ("", "R4"),
    };
    let o = t.oracle();
    let index = if o.j == 0 {
        format!("{}*n", o.b)
    } else {
        format!("{}*n+{}", o.b, o.j)
    };
    // the summand is +1 when the parity bit is 0, before negation
    let (up, down) = if o.negate { (1, 0) } else { (0, 1) };
    let h1 = t.value(1);
    let h1 = if h1 < 0 {
        format!("_{}", -h1)
    } else {
        h1.to_string()
    };
    format!(
        "{setup}\
eval {p}_1 \"An Ey ${name}(n,y)\":
eval {p}_2 \"~En,y1,y2 ${name}(n,y1) & ${name}(n,y2) & ?{ys} y1!=y2\":
eval {p}_base \"${name}(0, ?{ys} 0) & ${name}(1, ?{ys} {h1})\":
eval {p}_3 \"?{ns} An,x (n>=1 & ${name}(n, ?{ys} x) &
   {seq}[{index}]=@{up}) => ${name}(n+1, ?{ys} x+1)\":
eval {p}_4 \"?{ns} An,x (n>=1 & ${name}(n, ?{ys} x) &
   {seq}[{index}]=@{down}) => ${name}(n+1, ?{ys} x-1)\":
"
    )
}

/// Positivity for `n >= 1` and unboundedness (both directions for `f51`).
pub fn growth(t: Target) -> String {
    let name = t.name();
    let p = t.prefix();
    let [ns, ys] = t.signature().map(|s| s.tag());
    let positive = format!("eval {p}_5 \"?{ns} An,y (n>=1 & ${name}(n,y)) => ?{ys} y>0\":\n");
    let above = format!("eval {p}_6 \"?{ns} Ay En,x ${name}(n,x) & ?{ys} x>y\":\n");
    match t {
        Target::F30 | Target::Mf31 | Target::F50 | Target::G30 => positive + &above,
        Target::Mf32 => above,
        Target::F51 => format!(
            "eval {p}_5 \"?{ns} Ay En,x ${name}(n,x) & ?{ys} x>y\":\n\
             eval {p}_6 \"?{ns} Ay En,x ${name}(n,x) & ?{ys} x<y\":\n"
        ),
    }
}

pub const B34: &str = r#"reg p34 msd_3 msd_4 "([0,0]|[1,1]|[2,2])*":
eval bnd1 "?msd_4 An,x,m ($f30(n,x) & $p34(x,m)) => n<=m":
eval bnd2 "?msd_4 An,x,m (n>=1 & $f30(n,x) & $p34(x,m)) => 2*m+1<=3*n":
def bnd3 "?msd_4 Ex $f30(n,x) & $p34(x,n)":
def bnd4 "?msd_4 Ex,m $f30(n,x) & $p34(x,m) & 2*m+1=3*n":
"#;

pub const SPECIAL_VALUES: &str = r#"reg power43 msd_4 msd_3 "[0,0]*[1,1][0,0]*":
eval bound1 "?msd_4 Ax,y,w,z ($power43(x,y) & 3*w=260*x+1 &
   ?msd_3 z=55*y) => $f30(w,z)":
eval bound2 "?msd_4 Ax,y,w,z ($power43(x,y) & w=2*x &
   ?msd_3 z=2*y) => $f30(w,z)":
"#;

/// The two bound checks and two equality sets as written for `f30`, then
/// the lower equality set `n = 2m` that the lower bound `n/2` calls for.
pub const F31: &str = r#"reg p34 msd_3 msd_4 "([0,0]|[1,1]|[2,2])*":
eval test31_bnd1 "?msd_4 An,x,m ($mf31(n,x) & $p34(x,m)) => n<=2*m":
eval test31_bnd2 "?msd_4 An,x,m (n>=1 & $mf31(n,x) & $p34(x,m)) => 2*m+1<=3*n":
def test31_bnd3 "?msd_4 Ex $mf31(n,x) & $p34(x,n)":
def test31_bnd4 "?msd_4 Ex,m $mf31(n,x) & $p34(x,m) & 2*m+1=3*n":
def test31_lower "?msd_4 Ex,m $mf31(n,x) & $p34(x,m) & n=2*m":
"#;

pub const F32: &str = r#"reg p34 msd_3 msd_4 "([0,0]|[1,1]|[2,2])*":
reg power43 msd_4 msd_3 "[0,0]*[1,1][0,0]*":
eval test32_bnd "?msd_4 An,x,m ($mf32(n,x) & $p34(x,m)) => 4*m<=3*n+1":
def test32_zero "?msd_4 $mf32(n, ?msd_3 0)":
def test32_upper "?msd_4 Ex,m $mf32(n,x) & $p34(x,m) & 4*m=3*n+1":
def test32_powers "?msd_4 Ey $power43(n,y)":
"#;

pub const F50: &str = r#"reg p165 msd_16 msd_5 "([0,0]|[1,1]|[2,2]|[3,3]|[4,4])*":
eval test50_bnd1 "?msd_16 An,x,m (n>=2 & $f50(n,x) & $p165(m,x)) => 47*n+140<=176*m":
eval test50_bnd2 "?msd_16 An,x,m (n>=2 & $f50(n,x) & $p165(m,x)) => 4*m+11<=15*n":
def test50_lower "?msd_16 Ex,m n>=2 & $f50(n,x) & $p165(m,x) & 47*n+140=176*m":
def test50_upper "?msd_16 Ex,m n>=1 & $f50(n,x) & $p165(m,x) & 4*m+11=15*n":
"#;

/// `eval negvalues51_match` has the free variable `n`, so it is a `def`.
pub const F51: &str = r#"reg p165 msd_16 msd_5 "([0,0]|[1,1]|[2,2]|[3,3]|[4,4])*":
eval negvalues51 "?msd_16 An,x,y,w ((?msd_neg_5 x<0) &
   $f51(n,?msd_neg_5 x) & $conv55((?msd_neg_5 _x),?msd_5 y) &
   $p165(w,?msd_5 y)) => 2*w+3<=5*n":
def negvalues51_match "?msd_16 Ex,y,w (?msd_neg_5 x<0) &
   $f51(n,?msd_neg_5 x) & $conv55((?msd_neg_5 _x),?msd_5 y) &
   $p165(w,?msd_5 y) & 2*w+3=5*n":
def mult2 "?msd_16 x=2*y":
def mult3 "?msd_16 x=3*y":
def mult4 "?msd_16 Ez $mult2(x,z) & $mult2(z,y)":
def mult12 "?msd_16 Ez $mult3(x,z) & $mult4(z,y)":
def mult13 "?msd_16 Ez x=y+z & $mult12(z,y)":
def mult52 "?msd_16 Ez $mult4(x,z) & $mult13(z,y)":
def mult53 "?msd_16 Ez x=y+z & $mult52(z,y)":
def mult212 "?msd_16 Ez $mult4(x,z) & $mult53(z,y)":
def mult213 "?msd_16 Ez x=y+z & $mult212(z,y)":
def mult852 "?msd_16 Ez $mult4(x,z) & $mult213(z,y)":
def mult853 "?msd_16 Ez x=y+z & $mult852(z,y)":
def mult3412 "?msd_16 Ez $mult4(x,z) & $mult853(z,y)":
def pv51 "?msd_16 Ex,y (?msd_neg_5 x>=0) & $f51(n,?msd_neg_5 x)
   & $conv55((?msd_neg_5 x),?msd_5 y) & $p165(w,?msd_5 y)":
eval f51pcheck "?msd_16 An,w,t (n>=30 & $pv51(n,w) &
   $mult3412(t,w)) => t+463<=121*n":
def f51p_equal "?msd_16 Ew,t n>=30 & $pv51(n,w) & $mult3412(t,w)
   & t+463=121*n":
def f51eq0 "?msd_16 $f51(n,?msd_neg_5 0)":
"#;

pub const G30: &str = r#"reg p34 msd_3 msd_4 "([0,0]|[1,1]|[2,2])*":
reg power43 msd_4 msd_3 "[0,0]*[1,1][0,0]*":
eval testg30_bnd "?msd_4 An,x,m ($g30(n,x) & $p34(x,m)) => 4*m<=3*n+2":
def testg30_upper "?msd_4 Ex,m $g30(n,x) & $p34(x,m) & 4*m=3*n+2":
def testg30_upper_family "?msd_4 Ex,y $power43(x,y) & x>=4 & 3*n=x+2":
def testg30_one "?msd_4 $g30(n, ?msd_3 1)":
def testg30_one_family "?msd_4 Ex,y $power43(x,y) & n=2*x+1":
"#;
