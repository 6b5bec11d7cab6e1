"""Reference expression tables for the bundled example models.

These are the documented solutions the bundled models are expected to
reproduce, recorded in the report's flat string form. The analysis pipeline
diffs its mechanically derived results against this table and reports any
mismatch in the ``checks`` map; the derivation always wins, the table entry
is kept as the recorded point of comparison. For the spinning model the
tabulated rate of pi_psi5 deliberately preserves a known misprint (the mass
factor is missing), so its check is expected to read false.
"""

REFERENCE = {
    "spinning_particle": {
        "momenta": {
            "pi_e": "0",
            "pi_chi": "0",
            "p0": "(-d_x0 + I*chi*psi0)/e",
            "p1": "(d_x1 - I*chi*psi1)/e",
            "p2": "(d_x2 - I*chi*psi2)/e",
            "p3": "(d_x3 - I*chi*psi3)/e",
            "pi_psi0": "-I*psi0",
            "pi_psi1": "I*psi1",
            "pi_psi2": "I*psi2",
            "pi_psi3": "I*psi3",
            "pi_psi5": "I*psi5",
        },
        "velocities": {
            "d_x0": "-e*p0 + I*chi*psi0",
            "d_x1": "e*p1 + I*chi*psi1",
            "d_x2": "e*p2 + I*chi*psi2",
            "d_x3": "e*p3 + I*chi*psi3",
        },
        "h0": "-1/2*e*p0^2 + 1/2*e*p1^2 + 1/2*e*p2^2 + 1/2*e*p3^2 + 1/2*e*m^2"
              " + I*p0*chi*psi0 + I*p1*chi*psi1 + I*p2*chi*psi2 + I*p3*chi*psi3"
              " - I*m*chi*psi5",
        "tdes": {
            "x0": {"tau": "-e*p0 + I*chi*psi0"},
            "x1": {"tau": "e*p1 + I*chi*psi1"},
            "x2": {"tau": "e*p2 + I*chi*psi2"},
            "x3": {"tau": "e*p3 + I*chi*psi3"},
            "p0": {},
            "p1": {},
            "p2": {},
            "p3": {},
            "pi_e": {"tau": "-1/2*p0^2 + 1/2*p1^2 + 1/2*p2^2 + 1/2*p3^2 + 1/2*m^2"},
            "pi_chi": {"tau": "I*p0*psi0 + I*p1*psi1 + I*p2*psi2 + I*p3*psi3"
                              " - I*m*psi5"},
            "pi_psi0": {"tau": "-I*p0*chi", "psi0": "I"},
            "pi_psi1": {"tau": "-I*p1*chi", "psi1": "-I"},
            "pi_psi2": {"tau": "-I*p2*chi", "psi2": "-I"},
            "pi_psi3": {"tau": "-I*p3*chi", "psi3": "-I"},
            # recorded misprint: the mechanical rate carries a factor m
            "pi_psi5": {"tau": "I*chi", "psi5": "-I"},
            "p_tau": {},
        },
        "secondary_constraints": {
            "H5": "p0^2 - p1^2 - p2^2 - p3^2 - m^2",
            "H6": "p0*psi0 + p1*psi1 + p2*psi2 + p3*psi3 - m*psi5",
        },
        "determined_differentials": {
            "psi0": {"tau": "1/2*p0*chi"},
            "psi1": {"tau": "-1/2*p1*chi"},
            "psi2": {"tau": "-1/2*p2*chi"},
            "psi3": {"tau": "-1/2*p3*chi"},
            "psi5": {"tau": "1/2*m*chi"},
        },
    },
    "spinless_particle": {
        "momenta": {
            "pi_e": "0",
            "p0": "-d_x0/e",
            "p1": "d_x1/e",
            "p2": "d_x2/e",
            "p3": "d_x3/e",
        },
        "velocities": {
            "d_x0": "-e*p0",
            "d_x1": "e*p1",
            "d_x2": "e*p2",
            "d_x3": "e*p3",
        },
        "h0": "-1/2*e*p0^2 + 1/2*e*p1^2 + 1/2*e*p2^2 + 1/2*e*p3^2 + 1/2*e*m^2",
        "tdes": {
            "x0": {"tau": "-e*p0"},
            "x1": {"tau": "e*p1"},
            "x2": {"tau": "e*p2"},
            "x3": {"tau": "e*p3"},
            "pi_e": {"tau": "-1/2*p0^2 + 1/2*p1^2 + 1/2*p2^2 + 1/2*p3^2 + 1/2*m^2"},
            "p0": {},
            "p1": {},
            "p2": {},
            "p3": {},
            "p_tau": {},
        },
        "secondary_constraints": {
            "H2": "p0^2 - p1^2 - p2^2 - p3^2 - m^2",
        },
        "determined_differentials": {},
    },
}
