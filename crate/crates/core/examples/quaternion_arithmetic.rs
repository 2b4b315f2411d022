//! Quaternion products, inverses and η-conjugation.

use qsylv::{Eta, Quaternion};

fn main() {
    let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
    println!("i j = {:?}", (i * j).to_array());
    println!("j i = {:?}", (j * i).to_array());
    println!("i j k = {:?}", (i * j * k).to_array());

    let q = Quaternion::new(1.0, 2.0, -1.0, 0.5);
    let inv = q.inv().expect("non-zero");
    println!("q q^-1 = {:?}", (q * inv).to_array());
    for eta in Eta::ALL {
        let q_eta = -(eta.unit() * q * eta.unit());
        println!("q^{eta} = -{eta} q {eta} = {:?}", q_eta.to_array());
        println!("q^{eta}* = {:?} (conjugate of the above: {:?})", q.eta_conj(eta).to_array(), q_eta.conj().to_array());
    }
}
