#include "tcas/eval.hpp"

namespace tcas::eval {

double far(const Vector& impostor, double threshold) {
  if (impostor.size() == 0) throw EmptyScores("FAR needs at least one impostor score");
  return static_cast<double>((impostor.array() >= threshold).count()) /
         static_cast<double>(impostor.size());
}

double frr(const Vector& genuine, double threshold) {
  if (genuine.size() == 0) throw EmptyScores("FRR needs at least one genuine score");
  return static_cast<double>((genuine.array() < threshold).count()) /
         static_cast<double>(genuine.size());
}

Rates metrics(const Vector& genuine, const Vector& impostor, double threshold) {
  Rates r;
  r.far = far(impostor, threshold);
  r.frr = frr(genuine, threshold);
  r.hter = hter(r.far, r.frr);
  return r;
}

}  // namespace tcas::eval
