from .__main__ import (
    configure_logging,
    create_parser,
    enable_debug_if_necessary,
    is_debug_enabled,
    main,
)
