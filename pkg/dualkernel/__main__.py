import sys

from dualkernel.cli import main

sys.exit(main())
