#include "rmdp/savgol.hpp"

#include "rmdp/errors.hpp"

#include <Eigen/Dense>

namespace rmdp {

std::vector<double> savitzky_golay_smooth(std::span<const double> series, std::size_t window,
                                          std::size_t poly_order) {
    if (window % 2 == 0) throw InvalidArgument("savitzky-golay window must be odd");
    if (window <= poly_order) throw InvalidArgument("savitzky-golay window must exceed the order");
    if (series.size() < window) throw InvalidArgument("series is shorter than the window");

    const auto w = static_cast<Eigen::Index>(window);
    const auto half = w / 2;
    // Vandermonde on centered abscissae; hat = A (A^T A)^-1 A^T maps a window
    // of samples to the fitted values at every window position.
    Eigen::MatrixXd vander(w, static_cast<Eigen::Index>(poly_order) + 1);
    for (Eigen::Index i = 0; i < w; ++i) {
        const double x = static_cast<double>(i - half) / static_cast<double>(half == 0 ? 1 : half);
        double term = 1.0;
        for (Eigen::Index k = 0; k < vander.cols(); ++k) {
            vander(i, k) = term;
            term *= x;
        }
    }
    const Eigen::MatrixXd coef = vander.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(w, w));
    const Eigen::MatrixXd hat = vander * coef;

    const auto n = static_cast<Eigen::Index>(series.size());
    Eigen::Map<const Eigen::VectorXd> y(series.data(), n);
    std::vector<double> out(series.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index start = i - half;
        Eigen::Index row = half;
        if (start < 0) {
            start = 0;
            row = i;
        } else if (start + w > n) {
            start = n - w;
            row = i - start;
        }
        out[static_cast<std::size_t>(i)] = hat.row(row).dot(y.segment(start, w));
    }
    return out;
}

} // namespace rmdp
