#include "qbm/csv.hpp"

#include <ostream>
#include <sstream>

namespace qbm {

void write_manifest(std::ostream& out, const RunConfig& config, const Switches& switches,
                    const ManifestExtras& extras) {
    for (const auto& [key, value] : config.entries()) out << "# " << key << " = " << value << '\n';
    out << "# resolved_frequency_convention = " << to_string(switches.frequency) << '\n';
    out << "# resolved_noise_convention = " << to_string(switches.noise) << '\n';
    out << "# resolved_dissipation_sign = " << switches.dissipation_sign << '\n';
    for (const auto& [key, value] : extras) out << "# " << key << " = " << value << '\n';
}

void write_witness_csv(std::ostream& out, const WitnessSeries& w) {
    out << "t,det,det_identity,discrepancy,mask\n";
    out.precision(17);
    for (std::size_t n = 0; n < w.det.size(); ++n) {
        out << w.grid.t(n) << ',' << w.det[n] << ',' << w.det_identity[n] << ',' << w.discrepancy[n] << ','
            << static_cast<int>(w.masked[n]) << '\n';
    }
}

void write_oracle_csv(std::ostream& out, const OracleComparison& c) {
    out << "t,q_a,p_a,var_q,var_p,cov_qp,oracle_q_a,oracle_p_a,oracle_var_q,oracle_var_p,oracle_cov_qp\n";
    out.precision(17);
    for (std::size_t n = 0; n < c.analytic.states.size(); ++n) {
        const auto& a = c.analytic.states[n];
        const auto& b = c.oracle.states[n];
        out << c.analytic.grid.t(n) << ',' << a.q_a << ',' << a.p_a << ',' << a.var_q << ',' << a.var_p << ','
            << a.cov_qp << ',' << b.q_a << ',' << b.p_a << ',' << b.var_q << ',' << b.var_p << ',' << b.cov_qp
            << '\n';
    }
}

void write_table1_csv(std::ostream& out, const Table1Report& r) {
    out << "s,gamma,t_end,var_p_0,var_p_05,var_p_1,cov_qp_05,cov_qp_1,ratio_p2_0_05,ratio_p2_0_1,ratio_qp_05_1,"
           "drift\n";
    out.precision(10);
    for (const Table1Row* row : {&r.ohmic, &r.superohmic}) {
        out << row->s << ',' << row->gamma << ',' << row->t_end << ',' << row->var_p[0] << ',' << row->var_p[1]
            << ',' << row->var_p[2] << ',' << row->cov_qp[1] << ',' << row->cov_qp[2] << ',' << row->ratios[0]
            << ',' << row->ratios[1] << ',' << row->ratios[2] << ',' << row->drift << '\n';
    }
}

void write_calibration_csv(std::ostream& out, const CalibrationReport& r) {
    out << "frequency_convention,noise_convention,dissipation_sign,discrepancy,selected\n";
    out.precision(10);
    for (const auto& e : r.entries) {
        out << to_string(e.switches.frequency) << ',' << to_string(e.switches.noise) << ','
            << e.switches.dissipation_sign << ',' << e.discrepancy << ',' << (e.switches == r.selected ? 1 : 0)
            << '\n';
    }
}

std::string mu_tag(double mu) { return "mu" + format_number(mu); }

}  // namespace qbm
