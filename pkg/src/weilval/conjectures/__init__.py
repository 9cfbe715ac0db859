from .bounds import (BoundReport, DorothyFailure, DorothyWitness, ScanBudgetError, UBCReport,
                     bound_report, dorothy_witness, field_valuation, negation_pair_ok,
                     prime_field_equality, quadratic_half_check, subfield_sandwich,
                     theorem_case, theorem_cecilia_check, upper_bound_conjecture_scan)
from .covering import (CertificateError, CounterexampleFound, CoveringBlock,
                       CoveringPrecondition, CoveringReport, CoveringWitness, check_certificate,
                       covering_scan, covering_witness, covers)
