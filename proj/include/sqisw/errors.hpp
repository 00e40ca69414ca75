#pragma once

#include <stdexcept>

namespace sqisw {

// Invalid or inconsistent user-supplied configuration or input data.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Singular systems, rank deficiency, estimators without a usable solution.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Extraction formulas evaluated outside their domain of validity.
class extraction_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sqisw
