/* Compiled as C: the public header must stay valid C. */
#include "radialcap/radialcap.h"

int rc_header_check_status(void) {
    rc_classify_options opts;
    rc_classify_options_default(&opts);
    return opts.k_max > 0 ? (int)RC_OK : (int)RC_ERR_INTERNAL;
}
