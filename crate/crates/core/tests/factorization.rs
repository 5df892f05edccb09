mod common;

use common::factor;
use proptest::prelude::*;

fn ok(r: common::props::Check) -> Result<(), TestCaseError> {
    r.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn factorizations_have_their_properties(seed in any::<u64>()) {
        ok(factor::factorization_case(seed))?;
    }

    #[test]
    fn omega_is_functorial(seed in any::<u64>()) {
        ok(factor::square_case(seed))?;
    }

    #[test]
    fn fibrant_replacement_is_identity(seed in any::<u64>()) {
        ok(factor::fibrant_case(seed))?;
    }
}
