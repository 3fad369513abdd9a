#pragma once

namespace mmlevy {

enum class QuadMethod {
    closed_form,  ///< exact transforms for the supported density families
    adaptive,     ///< panel-adaptive Gauss-Kronrod on a truncated interval
};

struct QuadSettings {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    /// The finite upper limit is chosen so the neglected tail is below this.
    double truncation_tail = 1e-16;
    QuadMethod method = QuadMethod::closed_form;
};

}  // namespace mmlevy
