#pragma once

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>

namespace mechlab {

inline double norm_pdf(double z) {
    static const boost::math::normal_distribution<double> nd;
    return boost::math::pdf(nd, z);
}

inline double norm_cdf(double z) {
    static const boost::math::normal_distribution<double> nd;
    return boost::math::cdf(nd, z);
}

/// Inverse standard normal CDF. p must lie strictly inside (0,1).
inline double norm_quantile(double p) {
    static const boost::math::normal_distribution<double> nd;
    return boost::math::quantile(nd, p);
}

inline double beta_pdf(double alpha, double beta, double x) {
    return boost::math::pdf(boost::math::beta_distribution<double>(alpha, beta), x);
}

inline double beta_cdf(double alpha, double beta, double x) {
    return boost::math::cdf(boost::math::beta_distribution<double>(alpha, beta), x);
}

inline double beta_quantile(double alpha, double beta, double p) {
    return boost::math::quantile(boost::math::beta_distribution<double>(alpha, beta), p);
}

}  // namespace mechlab
