#ifndef EVIL_STATS_H_
#define EVIL_STATS_H_

#include <vector>

namespace evil {

double mean(const std::vector<double>& xs);
// Sample standard deviation over sqrt(n); 0 for a single value.
double standard_error(const std::vector<double>& xs);

}  // namespace evil

#endif  // EVIL_STATS_H_
