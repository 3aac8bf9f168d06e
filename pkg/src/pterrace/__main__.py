import sys

from pterrace.cli import main

sys.exit(main())
