#include "fdbeam/link_metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace fdbeam {

void LinkBudget::validate() const {
  const double fields[] = {p_bs_dbm, p_ue_dbm, noise_bs_dbm, noise_ue_dbm};
  for (double v : fields)
    if (!std::isfinite(v))
      throw std::invalid_argument("budget: powers must be finite");
  if (noise_bs_dbm >= p_bs_dbm || noise_ue_dbm >= p_ue_dbm)
    throw std::invalid_argument("budget: noise power must be below tx power");
}

double snr_dl(const BeamWeights& f, const LinkChannel& h_tx,
              const LinkBudget& budget) {
  if (f.weights.size() != h_tx.vector.size())
    throw std::invalid_argument("snr_dl: beam/channel dimension mismatch");
  return dbm_to_mw(budget.p_bs_dbm) * std::norm(beam_dot(h_tx.vector, f.weights)) /
         dbm_to_mw(budget.noise_ue_dbm);
}

double snr_ul(const BeamWeights& w, const LinkChannel& h_rx,
              const LinkBudget& budget) {
  if (w.weights.size() != h_rx.vector.size())
    throw std::invalid_argument("snr_ul: beam/channel dimension mismatch");
  return dbm_to_mw(budget.p_ue_dbm) * std::norm(beam_dot(w.weights, h_rx.vector)) /
         dbm_to_mw(budget.noise_bs_dbm);
}

double inr_si(const BeamWeights& f, const BeamWeights& w, const SiChannel& H,
              const LinkBudget& budget) {
  if (H.matrix.rows() != w.weights.size() || H.matrix.cols() != f.weights.size())
    throw std::invalid_argument("inr_si: beam/channel dimension mismatch");
  const Complex coupling = (w.weights.transpose() * H.matrix * f.weights).value();
  return dbm_to_mw(budget.p_bs_dbm) * std::norm(coupling) /
         dbm_to_mw(budget.noise_bs_dbm);
}

double inr_cl(const CrosslinkChannel& h, const LinkBudget& budget) {
  return dbm_to_mw(budget.p_ue_dbm) * std::norm(h.scalar) /
         dbm_to_mw(budget.noise_ue_dbm);
}

}  // namespace fdbeam
