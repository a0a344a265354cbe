#ifndef UPB_VERSION_HPP
#define UPB_VERSION_HPP

#define UPB_VERSION "0.1.0"

#endif
