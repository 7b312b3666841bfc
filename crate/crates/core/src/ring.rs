use crate::coeff::Scalar;

/// Unital associative algebra over [`Scalar`], as needed by expression evaluation.
pub trait Ring: Clone {
    /// Unit of the same shape as `self`.
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, s: &Scalar) -> Self;
    fn is_zero(&self) -> bool;
    /// Two-sided inverse when cheaply available (grouplike letters, diagonal matrices).
    fn try_inverse(&self) -> Option<Self>;

    fn neg(&self) -> Self {
        self.scale(&Scalar::int(-1))
    }

    /// `q^n a b - q^-n b a`.
    fn qcomm(&self, o: &Self, n: i32) -> Self {
        let ab = self.mul(o);
        let ba = o.mul(self);
        if n == 0 {
            return ab.sub(&ba);
        }
        ab.scale(&Scalar::qpow(n)).sub(&ba.scale(&Scalar::qpow(-n)))
    }

    fn comm(&self, o: &Self) -> Self {
        self.qcomm(o, 0)
    }
}
