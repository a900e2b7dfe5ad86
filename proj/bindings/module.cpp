#include <pybind11/pybind11.h>
PYBIND11_MODULE(pyspars, m) { m.doc() = "placeholder"; }
